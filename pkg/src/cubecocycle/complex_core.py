import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from cubecocycle.exceptions import (
    DisconnectedComplexError,
    InvalidComplexError,
    PathError,
)
from cubecocycle.utils.log import get_logger

logger = get_logger(__name__)

MEDIAN_EXHAUSTIVE_CAP = 500
MEDIAN_SAMPLE_SIZE = 20_000
PATH_CAP = 720
REDUCTION_STEP_CAP = 100_000

VertexId = int


@dataclass(frozen=True, order=True)
class Cube:
    """A cube given by its sorted vertex tuple."""

    vertices: Tuple[VertexId, ...]
    dim: int

    @classmethod
    def of(cls, vertices: Iterable[VertexId]) -> "Cube":
        vertex_tuple = tuple(sorted(set(vertices)))
        size = len(vertex_tuple)
        dim = size.bit_length() - 1
        if size == 0 or 1 << dim != size:
            raise InvalidComplexError(
                f"a cube needs 2^n vertices, got {size}",
                witness=vertex_tuple,
            )
        return cls(vertex_tuple, dim)

    @cached_property
    def vertex_set(self) -> FrozenSet[VertexId]:
        return frozenset(self.vertices)

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.vertex_set

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class EdgePath:
    vertices: Tuple[VertexId, ...]

    @classmethod
    def of(cls, vertices: Iterable[VertexId]) -> "EdgePath":
        return cls(tuple(vertices))

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> VertexId:
        return self.vertices[0]

    @property
    def end(self) -> VertexId:
        return self.vertices[-1]

    def edges(self) -> Iterator[Tuple[VertexId, VertexId]]:
        return zip(self.vertices[:-1], self.vertices[1:])

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[VertexId]:
        return iter(self.vertices)


@dataclass(frozen=True)
class PathMove:
    """One rewrite of an edge-path.

    ``kind`` is ``"cancel"`` (``v, v', v`` -> ``v``) or ``"corner"``
    (``u, v, w`` -> ``u, v', w`` across a square). ``index`` is the
    position of the first vertex of the rewritten window.
    """

    kind: str
    index: int
    before: Tuple[VertexId, ...]
    after: Tuple[VertexId, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "index": self.index,
            "before": list(self.before),
            "after": list(self.after),
        }


@dataclass
class ValidationReport:
    n_vertices: int
    dim: int
    checks: Dict[str, bool] = field(default_factory=dict)
    failure: Optional[str] = None
    witness: Optional[Any] = None
    completed_faces: List[Tuple[VertexId, ...]] = field(default_factory=list)
    median_sampled: bool = False
    median_seed: Optional[int] = None

    @property
    def valid(self) -> bool:
        return self.failure is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "n_vertices": self.n_vertices,
            "dim": self.dim,
            "checks": dict(self.checks),
            "failure": self.failure,
            "witness": jsonable(self.witness),
            "completed_faces": [list(f) for f in self.completed_faces],
            "median_sampled": self.median_sampled,
            "median_seed": self.median_seed,
        }


def jsonable(value: Any) -> Any:
    """Convert witnesses and details to JSON-compatible values."""
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, EdgePath):
        return list(value.vertices)
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (int, float, str)) or value is None:
        return value
    return str(value)


def _cube_coordinates(
    ordered: Sequence[VertexId], edge_set: Set[FrozenSet[VertexId]]
) -> Optional[Dict[VertexId, int]]:
    """Bit coordinates of a cube's vertices read off its induced edges.

    Returns None if the induced graph is not a hypercube graph.
    """
    vertices = sorted(set(ordered))
    dim = len(vertices).bit_length() - 1
    inside = set(vertices)
    adjacency = {
        v: sorted(
            u
            for u in vertices
            if u != v and frozenset((u, v)) in edge_set and u in inside
        )
        for v in vertices
    }
    if any(len(nbrs) != dim for nbrs in adjacency.values()):
        return None

    def bfs(source: VertexId) -> Dict[VertexId, int]:
        seen = {source: 0}
        queue = deque([source])
        while queue:
            current = queue.popleft()
            for nxt in adjacency[current]:
                if nxt not in seen:
                    seen[nxt] = seen[current] + 1
                    queue.append(nxt)
        return seen

    base = vertices[0]
    base_dist = bfs(base)
    if len(base_dist) != len(vertices):
        return None
    axis_dist = [bfs(axis) for axis in adjacency[base]]
    coords = {}
    for v in vertices:
        mask = 0
        for i, dist in enumerate(axis_dist):
            if dist[v] == base_dist[v] - 1:
                mask |= 1 << i
        coords[v] = mask
    if sorted(coords.values()) != list(range(len(vertices))):
        return None
    for v in vertices:
        for u in adjacency[v]:
            if bin(coords[u] ^ coords[v]).count("1") != 1:
                return None
    return coords


def cube_faces(
    coords: Dict[VertexId, int], dim: int
) -> List[FrozenSet[VertexId]]:
    faces = []
    full = (1 << dim) - 1
    for fixed in range(full + 1):
        sub = fixed
        while True:
            faces.append(
                frozenset(v for v, c in coords.items() if c & fixed == sub)
            )
            if sub == 0:
                break
            sub = (sub - 1) & fixed
    return faces


@dataclass(frozen=True, eq=False)
class CubeComplex:
    """A finite cube complex: vertices ``0..n-1`` and a cube collection.

    The 1-skeleton is derived from the 1-dimensional cubes and never stored
    on its own. Instances are immutable; derived data is cached lazily.
    """

    n_vertices: int
    cubes: Tuple[Cube, ...]
    name: str = ""
    completed_faces: Tuple[Tuple[VertexId, ...], ...] = ()

    @classmethod
    def from_cubes(
        cls,
        n_vertices: int,
        cubes: Iterable[Sequence[VertexId]],
        complete_faces: bool = True,
        name: str = "",
    ) -> "CubeComplex":
        """Build a complex from a cube list, completing faces if asked.

        Faces of a cube are read off the edges listed among the input
        cubes when those induce a hypercube graph on it. Otherwise the
        input order of the cube's vertices is taken as binary coordinate
        order: the vertex at position ``i`` sits at the corner whose
        coordinates are the bits of ``i``.

        Args:
            n_vertices (int): Number of vertices.
            cubes (Iterable[Sequence[int]]): Cubes as vertex lists.
            complete_faces (bool, optional): Add missing faces and
                singletons. Defaults to True.
            name (str, optional): Label used in reports.

        Returns:
            CubeComplex: The complex (not yet validated).
        """
        raw = [list(c) for c in cubes]
        for cube in raw:
            for v in cube:
                if not 0 <= v < n_vertices:
                    raise InvalidComplexError(
                        f"vertex {v} out of range 0..{n_vertices - 1}",
                        witness=cube,
                    )
        given = {frozenset(c) for c in raw}
        collected = set(given)
        if complete_faces:
            edge_set = {c for c in given if len(c) == 2}
            for cube in sorted(raw, key=len):
                if len(cube) <= 2:
                    continue
                dim = len(set(cube)).bit_length() - 1
                if 1 << dim != len(set(cube)):
                    raise InvalidComplexError(
                        f"a cube needs 2^n vertices, got {len(set(cube))}",
                        witness=sorted(cube),
                    )
                coords = _cube_coordinates(cube, edge_set)
                if coords is None:
                    coords = {v: i for i, v in enumerate(cube)}
                for face in cube_faces(coords, dim):
                    collected.add(face)
                    if len(face) == 2:
                        edge_set.add(face)
            collected.update(frozenset((v,)) for v in range(n_vertices))
        completed = sorted(tuple(sorted(c)) for c in collected - given)
        if completed:
            logger.info(f"Completed {len(completed)} faces of {name!r}")
        ordered = sorted(
            (Cube.of(c) for c in collected), key=lambda c: (c.dim, c)
        )
        return cls(
            n_vertices=n_vertices,
            cubes=tuple(ordered),
            name=name,
            completed_faces=tuple(completed),
        )

    @classmethod
    def from_dict(
        cls, data: Dict[str, Any], name: str = ""
    ) -> "CubeComplex":
        try:
            n_vertices = int(data["n_vertices"])
            cubes = [[int(v) for v in c] for c in data["cubes"]]
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidComplexError(
                f"malformed complex document: {e}"
            ) from e
        return cls.from_cubes(n_vertices, cubes, name=name)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "CubeComplex":
        """Load the ``{"n_vertices": int, "cubes": [[int, ...], ...]}``
        format. Raises ``json.JSONDecodeError`` on malformed files."""
        with open(path, "r") as f:
            data = json.load(f)
        return cls.from_dict(data, name=Path(path).stem)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_vertices": self.n_vertices,
            "cubes": [list(c.vertices) for c in self.cubes],
        }

    @cached_property
    def cube_set(self) -> FrozenSet[FrozenSet[VertexId]]:
        return frozenset(c.vertex_set for c in self.cubes)

    @cached_property
    def cubes_by_vertex(self) -> Dict[VertexId, List[Cube]]:
        table: Dict[VertexId, List[Cube]] = {
            v: [] for v in range(self.n_vertices)
        }
        for cube in self.cubes:
            for v in cube.vertices:
                table[v].append(cube)
        return table

    @cached_property
    def edges(self) -> List[Tuple[VertexId, VertexId]]:
        return [c.vertices for c in self.cubes if c.dim == 1]

    @cached_property
    def squares(self) -> List[Cube]:
        return [c for c in self.cubes if c.dim == 2]

    @cached_property
    def dim(self) -> int:
        return max((c.dim for c in self.cubes), default=0)

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_vertices))
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def adjacency(self) -> List[Tuple[VertexId, ...]]:
        return [
            tuple(sorted(self.graph.neighbors(v)))
            for v in range(self.n_vertices)
        ]

    @cached_property
    def edge_set(self) -> FrozenSet[FrozenSet[VertexId]]:
        return frozenset(frozenset(e) for e in self.edges)

    @cached_property
    def sparse_adjacency(self) -> csr_matrix:
        n = self.n_vertices
        if not self.edges:
            return csr_matrix((n, n), dtype=np.int8)
        rows, cols = zip(*self.edges)
        data = np.ones(2 * len(rows), dtype=np.int8)
        return csr_matrix(
            (data, (rows + cols, cols + rows)), shape=(n, n)
        )

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs edge-path distances, ``-1`` between components."""
        dist = shortest_path(
            self.sparse_adjacency, directed=False, unweighted=True
        )
        dist[np.isinf(dist)] = -1
        return dist.astype(np.int64)

    @cached_property
    def component_labels(self) -> np.ndarray:
        _, labels = connected_components(
            self.sparse_adjacency, directed=False
        )
        return labels

    @property
    def is_connected(self) -> bool:
        return self.n_vertices == 0 or bool(
            np.all(self.component_labels == self.component_labels[0])
        )

    def component_of(self, vertex: VertexId) -> List[VertexId]:
        label = self.component_labels[vertex]
        return [int(v) for v in np.flatnonzero(self.component_labels == label)]

    def is_cube(self, vertices: Iterable[VertexId]) -> bool:
        return frozenset(vertices) in self.cube_set

    def is_edge(self, u: VertexId, v: VertexId) -> bool:
        return frozenset((u, v)) in self.edge_set

    def neighbors(self, vertex: VertexId) -> Tuple[VertexId, ...]:
        return self.adjacency[vertex]

    def check_vertex(self, vertex: VertexId) -> None:
        if not 0 <= vertex < self.n_vertices:
            raise PathError(
                f"vertex {vertex} not in complex with "
                f"{self.n_vertices} vertices",
                witness=vertex,
            )

    def distance(self, x: VertexId, y: VertexId) -> int:
        return distance(self, x, y)

    def __repr__(self) -> str:
        label = f"{self.name!r}, " if self.name else ""
        return (
            f"CubeComplex({label}n_vertices={self.n_vertices}, "
            f"cubes={len(self.cubes)}, dim={self.dim})"
        )


def _check_closure(
    complex_: CubeComplex, report: ValidationReport
) -> bool:
    for v in range(complex_.n_vertices):
        if frozenset((v,)) not in complex_.cube_set:
            report.witness = {"missing_singleton": v}
            return False
    for v in range(complex_.n_vertices):
        incident = complex_.cubes_by_vertex[v]
        for first, second in itertools.combinations(incident, 2):
            meet = first.vertex_set & second.vertex_set
            if min(meet) != v:
                continue
            if meet not in complex_.cube_set:
                report.witness = {
                    "cubes": [list(first.vertices), list(second.vertices)],
                    "intersection": sorted(meet),
                }
                return False
    return True


def _check_cubes(complex_: CubeComplex, report: ValidationReport) -> bool:
    for cube in complex_.cubes:
        if cube.dim < 2:
            continue
        coords = _cube_coordinates(cube.vertices, set(complex_.edge_set))
        if coords is None:
            report.witness = {"not_a_hypercube": list(cube.vertices)}
            return False
        for face in cube_faces(coords, cube.dim):
            if face not in complex_.cube_set:
                report.witness = {
                    "cube": list(cube.vertices),
                    "missing_face": sorted(face),
                }
                return False
    return True


def _interval_bitsets(dist: np.ndarray, source: VertexId) -> List[int]:
    """Row ``v`` is the interval from ``source`` to ``v`` as a bitmask."""
    n = dist.shape[0]
    on_geodesic = dist[source][None, :] + dist == dist[source][:, None]
    packed = np.packbits(on_geodesic, axis=1, bitorder="little")
    return [int.from_bytes(packed[v].tobytes(), "little") for v in range(n)]


def _bits(mask: int) -> List[VertexId]:
    members = []
    while mask:
        low = mask & -mask
        members.append(low.bit_length() - 1)
        mask ^= low
    return members


def _check_median(
    complex_: CubeComplex,
    report: ValidationReport,
    cap: int,
    seed: int,
    sample_size: int,
) -> bool:
    n = complex_.n_vertices
    dist = complex_.distances
    if n <= cap:
        intervals = [_interval_bitsets(dist, v) for v in range(n)]
        for x in range(n):
            for y in range(x + 1, n):
                xy = intervals[x][y]
                for z in range(y + 1, n):
                    meet = xy & intervals[x][z] & intervals[y][z]
                    if meet.bit_count() != 1:
                        report.witness = {
                            "triple": [x, y, z],
                            "medians": _bits(meet),
                        }
                        return False
        return True

    report.median_sampled = True
    report.median_seed = seed
    rng = np.random.default_rng(seed)
    cache: Dict[VertexId, List[int]] = {}
    for _ in range(sample_size):
        x, y, z = (int(v) for v in rng.choice(n, size=3, replace=False))
        for v in (x, y):
            if v not in cache:
                cache[v] = _interval_bitsets(dist, v)
        meet = cache[x][y] & cache[x][z] & cache[y][z]
        if meet.bit_count() != 1:
            report.witness = {"triple": [x, y, z], "medians": _bits(meet)}
            return False
    logger.info(
        f"Median property sampled on {sample_size} triples (seed {seed})"
    )
    return True


def _check_squares(
    complex_: CubeComplex, report: ValidationReport
) -> bool:
    adjacency = [set(nbrs) for nbrs in complex_.adjacency]
    seen = set()
    for u in range(complex_.n_vertices):
        for a, b in itertools.combinations(sorted(adjacency[u]), 2):
            if b in adjacency[a]:
                continue
            for v in adjacency[a] & adjacency[b]:
                if v == u or v in adjacency[u]:
                    continue
                cycle = frozenset((u, a, v, b))
                if cycle in seen:
                    continue
                seen.add(cycle)
                if cycle not in complex_.cube_set:
                    report.witness = {"four_cycle": [u, a, v, b]}
                    return False
    return True


def validate(
    complex_: CubeComplex,
    median_cap: int = MEDIAN_EXHAUSTIVE_CAP,
    seed: int = 0,
    sample_size: int = MEDIAN_SAMPLE_SIZE,
) -> ValidationReport:
    """Check the cube-complex axioms and the combinatorial CAT(0) test.

    The CAT(0) test is: the 1-skeleton is a connected median graph and
    every induced 4-cycle is a square of the complex. Checks run in the
    order closure, cubes, connected, median, squares; ``failure`` names
    the first that fails and ``witness`` shows why.

    Args:
        complex_ (CubeComplex): The complex to check.
        median_cap (int, optional): Largest vertex count for which all
            triples are tested; larger complexes are sampled.
        seed (int, optional): Seed of the triple sample.
        sample_size (int, optional): Number of sampled triples.

    Returns:
        ValidationReport: The report.
    """
    report = ValidationReport(
        n_vertices=complex_.n_vertices,
        dim=complex_.dim,
        completed_faces=list(complex_.completed_faces),
    )
    stages = [
        ("closure", lambda: _check_closure(complex_, report)),
        ("cubes", lambda: _check_cubes(complex_, report)),
        ("connected", lambda: _check_connected(complex_, report)),
        (
            "median",
            lambda: _check_median(
                complex_, report, median_cap, seed, sample_size
            ),
        ),
        ("squares", lambda: _check_squares(complex_, report)),
    ]
    for stage, run in stages:
        passed = run()
        report.checks[stage] = passed
        if not passed:
            report.failure = stage
            logger.info(f"{complex_!r} fails {stage}: {report.witness}")
            break
    else:
        logger.info(f"{complex_!r} validated")
    return report


def _check_connected(
    complex_: CubeComplex, report: ValidationReport
) -> bool:
    if complex_.is_connected:
        return True
    first = complex_.component_of(0)
    other = next(
        v for v in range(complex_.n_vertices) if v not in set(first)
    )
    report.witness = {
        "components": [first, complex_.component_of(other)]
    }
    return False


def require_valid(complex_: CubeComplex, **kwargs: Any) -> ValidationReport:
    report = validate(complex_, **kwargs)
    if not report.valid:
        raise InvalidComplexError(
            f"{complex_!r} fails the {report.failure} check",
            witness=report.witness,
        )
    return report


def distance(complex_: CubeComplex, x: VertexId, y: VertexId) -> int:
    """Edge-path distance between ``x`` and ``y``."""
    complex_.check_vertex(x)
    complex_.check_vertex(y)
    d = int(complex_.distances[x, y])
    if d < 0:
        raise DisconnectedComplexError(
            f"vertices {x} and {y} lie in different components",
            witness=(complex_.component_of(x), complex_.component_of(y)),
        )
    return d


def is_geodesic(complex_: CubeComplex, path: EdgePath) -> bool:
    check_path(complex_, path)
    return path.length == distance(complex_, path.start, path.end)


def check_path(complex_: CubeComplex, path: EdgePath) -> None:
    if len(path) == 0:
        raise PathError("empty edge-path")
    for v in path:
        complex_.check_vertex(v)
    for u, v in path.edges():
        if not complex_.is_edge(u, v):
            raise PathError(f"step {u} -> {v} is not an edge", witness=(u, v))


def some_geodesic(complex_: CubeComplex, x: VertexId, y: VertexId) -> EdgePath:
    """The geodesic that always steps to the smallest admissible vertex."""
    remaining = distance(complex_, x, y)
    dist_to_y = complex_.distances[:, y]
    vertices = [x]
    current = x
    while remaining > 0:
        current = next(
            u
            for u in complex_.adjacency[current]
            if dist_to_y[u] == remaining - 1
        )
        vertices.append(current)
        remaining -= 1
    return EdgePath(tuple(vertices))


def all_geodesics(
    complex_: CubeComplex,
    x: VertexId,
    y: VertexId,
    cap: Optional[int] = None,
) -> Iterator[EdgePath]:
    """Enumerate geodesics from ``x`` to ``y`` in lexicographic order."""
    total = distance(complex_, x, y)
    dist_to_y = complex_.distances[:, y]
    produced = 0
    stack: List[Tuple[VertexId, ...]] = [(x,)]
    while stack:
        prefix = stack.pop()
        if len(prefix) == total + 1:
            yield EdgePath(prefix)
            produced += 1
            if cap is not None and produced >= cap:
                return
            continue
        remaining = total - len(prefix)
        steps = [
            u
            for u in complex_.adjacency[prefix[-1]]
            if dist_to_y[u] == remaining
        ]
        for u in reversed(steps):
            stack.append(prefix + (u,))


def median(
    complex_: CubeComplex, x: VertexId, y: VertexId, z: VertexId
) -> VertexId:
    dist = complex_.distances
    on_all = (
        (dist[x] + dist[y] == dist[x, y])
        & (dist[x] + dist[z] == dist[x, z])
        & (dist[y] + dist[z] == dist[y, z])
    )
    medians = [int(v) for v in np.flatnonzero(on_all)]
    if len(medians) != 1:
        raise InvalidComplexError(
            f"triple {(x, y, z)} has {len(medians)} medians",
            witness={"triple": [x, y, z], "medians": medians},
        )
    return medians[0]


def square_completion(
    complex_: CubeComplex, u: VertexId, v: VertexId, w: VertexId
) -> Optional[VertexId]:
    """The fourth vertex of the square through ``u, v, w``, if any."""
    if u == w:
        return None
    common = set(complex_.adjacency[u]) & set(complex_.adjacency[w])
    for candidate in sorted(common - {v}):
        if complex_.is_cube((u, v, w, candidate)):
            return candidate
    return None


def corner_moves(
    complex_: CubeComplex, path: EdgePath
) -> Iterator[Tuple[PathMove, EdgePath]]:
    """All single corner moves applicable to ``path``."""
    vertices = path.vertices
    for i in range(len(vertices) - 2):
        u, v, w = vertices[i : i + 3]
        other = square_completion(complex_, u, v, w)
        if other is None:
            continue
        move = PathMove("corner", i, (u, v, w), (u, other, w))
        yield move, EdgePath(vertices[: i + 1] + (other,) + vertices[i + 2 :])


def corner_move_closure(
    complex_: CubeComplex, path: EdgePath, cap: Optional[int] = None
) -> Set[EdgePath]:
    """Breadth-first search over the corner-move graph starting at
    ``path``; stops once ``cap`` paths have been reached."""
    seen = {path}
    queue = deque([path])
    while queue:
        current = queue.popleft()
        for _, nxt in corner_moves(complex_, current):
            if nxt not in seen:
                seen.add(nxt)
                if cap is not None and len(seen) >= cap:
                    return seen
                queue.append(nxt)
    return seen


def apply_move(path: EdgePath, move: PathMove) -> EdgePath:
    vertices = path.vertices
    window = vertices[move.index : move.index + len(move.before)]
    if window != move.before:
        raise PathError(
            f"move {move.kind} at {move.index} does not match the path",
            witness=(window, move.before),
        )
    return EdgePath(
        vertices[: move.index]
        + move.after
        + vertices[move.index + len(move.before) :]
    )


def replay_moves(path: EdgePath, moves: Sequence[PathMove]) -> EdgePath:
    for move in moves:
        path = apply_move(path, move)
    return path


def _shortest_bad_window(
    complex_: CubeComplex, vertices: Tuple[VertexId, ...]
) -> Optional[Tuple[int, int]]:
    dist = complex_.distances
    n = len(vertices)
    for span in range(2, n):
        for i in range(n - span):
            if dist[vertices[i], vertices[i + span]] < span:
                return i, span
    return None


def reduce_path(
    complex_: CubeComplex, path: EdgePath
) -> Tuple[EdgePath, List[PathMove]]:
    """Reduce an edge-path to a geodesic by corner moves and cancellations.

    Repeatedly takes the shortest non-geodesic window ``v_i .. v_j``; its
    first and last edges cross the same hyperplane. A window of length two
    is a back-and-forth and is cancelled; otherwise a corner move on
    ``v_i, v_{i+1}, v_{i+2}`` shortens the window by one.

    Args:
        complex_ (CubeComplex): A validated complex.
        path (EdgePath): Any edge-path.

    Returns:
        Tuple[EdgePath, List[PathMove]]: The geodesic and the move trace;
        ``replay_moves(path, trace)`` reproduces the geodesic.
    """
    check_path(complex_, path)
    vertices = path.vertices
    trace: List[PathMove] = []
    for _ in range(REDUCTION_STEP_CAP):
        window = _shortest_bad_window(complex_, vertices)
        if window is None:
            return EdgePath(vertices), trace
        i, span = window
        if span == 2:
            move = PathMove("cancel", i, vertices[i : i + 3], (vertices[i],))
        else:
            u, v, w = vertices[i : i + 3]
            other = square_completion(complex_, u, v, w)
            if other is None:
                raise InvalidComplexError(
                    f"no square through {(u, v, w)} while reducing",
                    witness=(u, v, w),
                )
            move = PathMove("corner", i, (u, v, w), (u, other, w))
        trace.append(move)
        vertices = apply_move(EdgePath(vertices), move).vertices
    raise PathError(
        f"path reduction exceeded {REDUCTION_STEP_CAP} moves",
        witness=path.vertices,
    )
