import itertools
import weakref
from dataclasses import dataclass
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Set,
    Tuple,
    Union,
)

import numpy as np
from networkx.utils import UnionFind
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from cubecocycle.complex_core import (
    Cube,
    CubeComplex,
    EdgePath,
    VertexId,
    check_path,
    distance,
    some_geodesic,
)
from cubecocycle.exceptions import (
    ConsistencyError,
    InvalidComplexError,
    PreconditionError,
)
from cubecocycle.utils.log import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Hyperplane:
    id: int
    edges: Tuple[Tuple[VertexId, VertexId], ...]


@dataclass(frozen=True)
class OrientedHyperplane:
    """A hyperplane together with its two half-spaces.

    ``plus_side`` holds the smallest vertex adjacent to the hyperplane.
    """

    hyperplane: Hyperplane
    plus_side: FrozenSet[VertexId]
    minus_side: FrozenSet[VertexId]
    boundary_plus: FrozenSet[VertexId]
    boundary_minus: FrozenSet[VertexId]

    @property
    def id(self) -> int:
        return self.hyperplane.id

    @property
    def edges(self) -> Tuple[Tuple[VertexId, VertexId], ...]:
        return self.hyperplane.edges

    def side(self, vertex: VertexId) -> int:
        return 1 if vertex in self.plus_side else -1

    def is_adjacent(self, vertex: VertexId) -> bool:
        return vertex in self.boundary_plus or vertex in self.boundary_minus


@dataclass(frozen=True)
class SeparatorSet:
    pair: Tuple[VertexId, VertexId]
    hyperplanes: FrozenSet[int]

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def __contains__(self, hyperplane_id: object) -> bool:
        return hyperplane_id in self.hyperplanes

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.hyperplanes))


HyperplaneLike = Union[int, Hyperplane, OrientedHyperplane]


def hyperplane_id(hyperplane: HyperplaneLike) -> int:
    if isinstance(hyperplane, (Hyperplane, OrientedHyperplane)):
        return hyperplane.id
    return int(hyperplane)


class HyperplaneSystem:
    """Vectorised hyperplane data of one complex.

    Attributes:
        plus (np.ndarray): ``(h, n)`` bool, ``plus[H, v]`` iff ``v`` in H₊.
        adjacent (np.ndarray): ``(h, n)`` bool, ``v`` adjacent to H.
        partner (np.ndarray): ``(h, n)`` int, the vertex across H from
            ``v`` or ``-1``.
        crossing (Set[FrozenSet[int]]): Pairs of hyperplanes crossing a
            common square.
        edge_label (Dict[FrozenSet[int], int]): Hyperplane of each edge.
    """

    def __init__(
        self,
        hyperplanes: List[OrientedHyperplane],
        n_vertices: int,
        edge_label: Dict[FrozenSet[VertexId], int],
        crossing: Set[FrozenSet[int]],
    ):
        self.hyperplanes = hyperplanes
        self.n_vertices = n_vertices
        self.edge_label = edge_label
        self.crossing = crossing
        count = len(hyperplanes)
        self.plus = np.zeros((count, n_vertices), dtype=bool)
        self.adjacent = np.zeros((count, n_vertices), dtype=bool)
        self.partner = np.full((count, n_vertices), -1, dtype=np.int64)
        for oriented in hyperplanes:
            h = oriented.id
            self.plus[h, list(oriented.plus_side)] = True
            for a, b in oriented.edges:
                self.adjacent[h, [a, b]] = True
                self.partner[h, a] = b
                self.partner[h, b] = a

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def __getitem__(self, hyperplane: HyperplaneLike) -> OrientedHyperplane:
        return self.hyperplanes[hyperplane_id(hyperplane)]

    def separating(self, x: VertexId, y: VertexId) -> np.ndarray:
        """Bool mask over hyperplanes separating ``x`` and ``y``."""
        return self.plus[:, x] != self.plus[:, y]

    def separator_ids(self, x: VertexId, y: VertexId) -> List[int]:
        return [int(h) for h in np.flatnonzero(self.separating(x, y))]

    def adjacent_to(self, vertex: VertexId) -> List[int]:
        return [int(h) for h in np.flatnonzero(self.adjacent[:, vertex])]

    def crosses(self, h: int, k: int) -> bool:
        return frozenset((h, k)) in self.crossing

    def quadrants(self, h: int, k: int) -> List[int]:
        """Sizes of ``H₊∩K₊, H₊∩K₋, H₋∩K₊, H₋∩K₋``."""
        hp, kp = self.plus[h], self.plus[k]
        return [
            int(np.count_nonzero(hp & kp)),
            int(np.count_nonzero(hp & ~kp)),
            int(np.count_nonzero(~hp & kp)),
            int(np.count_nonzero(~hp & ~kp)),
        ]


_SYSTEMS: "weakref.WeakKeyDictionary[CubeComplex, HyperplaneSystem]" = (
    weakref.WeakKeyDictionary()
)


def _square_edge_pairs(
    complex_: CubeComplex, square: Cube
) -> Iterator[Tuple[FrozenSet[VertexId], FrozenSet[VertexId]]]:
    edges = [
        frozenset(pair)
        for pair in itertools.combinations(square.vertices, 2)
        if complex_.is_edge(*pair)
    ]
    for first, second in itertools.combinations(edges, 2):
        if not first & second:
            yield first, second


def _build_system(complex_: CubeComplex) -> HyperplaneSystem:
    edges = [frozenset(e) for e in complex_.edges]
    index = {e: i for i, e in enumerate(edges)}
    classes = UnionFind(range(len(edges)))
    for square in complex_.squares:
        for first, second in _square_edge_pairs(complex_, square):
            classes.union(index[first], index[second])

    groups = sorted(
        (sorted(group) for group in classes.to_sets()), key=lambda g: g[0]
    )
    dist = complex_.distances
    n = complex_.n_vertices
    edge_array = np.array(complex_.edges, dtype=np.int64).reshape(-1, 2)
    hyperplanes = []
    edge_label = {}
    for h, group in enumerate(groups):
        members = tuple(complex_.edges[i] for i in group)
        touched: Dict[VertexId, Tuple[VertexId, VertexId]] = {}
        for edge in members:
            for v in edge:
                if v in touched:
                    raise InvalidComplexError(
                        f"hyperplane {h} self-intersects at vertex {v}",
                        witness={"vertex": v, "edges": [touched[v], edge]},
                    )
                touched[v] = edge
            edge_label[frozenset(edge)] = h

        anchor = min(touched)
        a, b = touched[anchor]
        if a != anchor:
            a, b = b, a
        plus_mask = dist[:, a] < dist[:, b]

        keep = np.ones(len(edge_array), dtype=bool)
        keep[group] = False
        rest = edge_array[keep]
        cut = csr_matrix(
            (np.ones(len(rest), dtype=np.int8), (rest[:, 0], rest[:, 1])),
            shape=(n, n),
        )
        n_parts, labels = connected_components(cut, directed=False)
        if n_parts != 2 or np.any(
            (labels == labels[a]) != plus_mask
        ):
            raise InvalidComplexError(
                f"removing hyperplane {h} leaves {n_parts} components",
                witness={"hyperplane": h, "edges": list(members)},
            )

        plus_side = frozenset(int(v) for v in np.flatnonzero(plus_mask))
        hyperplanes.append(
            OrientedHyperplane(
                hyperplane=Hyperplane(h, members),
                plus_side=plus_side,
                minus_side=frozenset(range(complex_.n_vertices)) - plus_side,
                boundary_plus=frozenset(
                    v for v in touched if v in plus_side
                ),
                boundary_minus=frozenset(
                    v for v in touched if v not in plus_side
                ),
            )
        )

    crossing = set()
    for square in complex_.squares:
        labels_in_square = {
            edge_label[frozenset(pair)]
            for pair in itertools.combinations(square.vertices, 2)
            if complex_.is_edge(*pair)
        }
        if len(labels_in_square) == 2:
            crossing.add(frozenset(labels_in_square))
    logger.info(
        f"{complex_!r}: {len(hyperplanes)} hyperplanes, "
        f"{len(crossing)} crossing pairs"
    )
    return HyperplaneSystem(
        hyperplanes, complex_.n_vertices, edge_label, crossing
    )


def hyperplane_system(complex_: CubeComplex) -> HyperplaneSystem:
    system = _SYSTEMS.get(complex_)
    if system is None:
        system = _build_system(complex_)
        _SYSTEMS[complex_] = system
    return system


def compute_hyperplanes(complex_: CubeComplex) -> List[OrientedHyperplane]:
    """Hyperplanes of a validated complex, oriented deterministically.

    Edges are grouped by the equivalence generated by opposite edges of
    squares. Each class must cut the 1-skeleton into exactly two
    components, otherwise the complex is not CAT(0).

    Args:
        complex_ (CubeComplex): A validated complex.

    Raises:
        InvalidComplexError: A class self-intersects or does not leave two
            components.

    Returns:
        List[OrientedHyperplane]: Hyperplanes indexed by id.
    """
    return list(hyperplane_system(complex_).hyperplanes)


def separators(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> SeparatorSet:
    complex_.check_vertex(x)
    complex_.check_vertex(y)
    system = hyperplane_system(complex_)
    return SeparatorSet((x, y), frozenset(system.separator_ids(x, y)))


def crossing_sequence(complex_: CubeComplex, path: EdgePath) -> List[int]:
    """Hyperplane ids crossed by the successive edges of ``path``."""
    check_path(complex_, path)
    system = hyperplane_system(complex_)
    return [system.edge_label[frozenset(edge)] for edge in path.edges()]


def opposite(
    complex_: CubeComplex, hyperplane: HyperplaneLike, vertex: VertexId
) -> VertexId:
    """The vertex across ``hyperplane`` from an adjacent ``vertex``."""
    system = hyperplane_system(complex_)
    partner = int(system.partner[hyperplane_id(hyperplane), vertex])
    if partner < 0:
        raise PreconditionError(
            f"vertex {vertex} is not adjacent to hyperplane "
            f"{hyperplane_id(hyperplane)}",
            witness=(hyperplane_id(hyperplane), vertex),
        )
    return partner


def intersects(
    complex_: CubeComplex, first: HyperplaneLike, second: HyperplaneLike
) -> bool:
    h, k = hyperplane_id(first), hyperplane_id(second)
    if h == k:
        raise PreconditionError(
            f"intersection of hyperplane {h} with itself", witness=h
        )
    system = hyperplane_system(complex_)
    by_square = system.crosses(h, k)
    by_quadrants = all(size > 0 for size in system.quadrants(h, k))
    if by_square != by_quadrants:
        raise ConsistencyError(
            f"hyperplanes {h} and {k}: square scan says {by_square}, "
            f"quadrants say {by_quadrants}",
            witness={"pair": [h, k], "quadrants": system.quadrants(h, k)},
        )
    return by_square


def parallel_component_count(
    complex_: CubeComplex, first: HyperplaneLike, second: HyperplaneLike
) -> int:
    """Number of nonempty quadrants cut out by two parallel hyperplanes."""
    h, k = hyperplane_id(first), hyperplane_id(second)
    if intersects(complex_, h, k):
        raise PreconditionError(
            f"hyperplanes {h} and {k} intersect", witness=(h, k)
        )
    count = sum(
        1 for size in hyperplane_system(complex_).quadrants(h, k) if size
    )
    if count > 3:
        raise ConsistencyError(
            f"parallel hyperplanes {h} and {k} leave {count} components",
            witness=(h, k),
        )
    return count


def spanning_cube(
    complex_: CubeComplex,
    x: VertexId,
    hyperplanes: Iterable[HyperplaneLike],
    y: VertexId,
) -> Tuple[Cube, VertexId]:
    """The cube at ``x`` in which the given separating hyperplanes meet.

    Args:
        complex_ (CubeComplex): A validated complex.
        x (int): Corner of the cube.
        hyperplanes (Iterable): Hyperplanes adjacent to ``x`` that
            separate ``x`` from ``y``.
        y (int): Target vertex.

    Raises:
        PreconditionError: A hyperplane is not adjacent to ``x`` or does
            not separate ``x`` from ``y``.

    Returns:
        Tuple[Cube, int]: The cube and its corner diagonal to ``x``.
    """
    system = hyperplane_system(complex_)
    ids = sorted({hyperplane_id(h) for h in hyperplanes})
    for h in ids:
        if not system.adjacent[h, x]:
            raise PreconditionError(
                f"hyperplane {h} is not adjacent to {x}", witness=h
            )
        if system.plus[h, x] == system.plus[h, y]:
            raise PreconditionError(
                f"hyperplane {h} does not separate {x} from {y}", witness=h
            )
    if not ids:
        return Cube.of((x,)), x
    corners = {int(system.partner[h, x]) for h in ids}
    for cube in complex_.cubes_by_vertex[x]:
        if cube.dim == len(ids) and corners <= cube.vertex_set:
            diagonal = next(
                v
                for v in cube.vertices
                if all(system.plus[h, v] != system.plus[h, x] for h in ids)
            )
            return cube, diagonal
    raise ConsistencyError(
        f"no {len(ids)}-cube at {x} spans hyperplanes {ids}",
        witness={"vertex": x, "hyperplanes": ids},
    )


def _adjacent_separators(
    system: HyperplaneSystem, x: VertexId, y: VertexId
) -> List[int]:
    mask = system.separating(x, y) & system.adjacent[:, x]
    return [int(h) for h in np.flatnonzero(mask)]


def fronted_geodesic(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> EdgePath:
    """A geodesic crossing the separators adjacent to ``x`` first."""
    distance(complex_, x, y)
    system = hyperplane_system(complex_)
    front = _adjacent_separators(system, x, y)
    if not front:
        return EdgePath((x,))
    _, corner = spanning_cube(complex_, x, front, y)
    vertices = [x]
    for h in front:
        vertices.append(int(system.partner[h, vertices[-1]]))
    if vertices[-1] != corner:
        raise ConsistencyError(
            f"walk across the spanning cube at {x} ends at {vertices[-1]}, "
            f"not at {corner}",
            witness=vertices,
        )
    rest = some_geodesic(complex_, corner, y)
    return EdgePath(tuple(vertices) + rest.vertices[1:])


def normal_cube_path(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> List[Cube]:
    """Greedy cube path: at each step cross every separator adjacent to
    the current vertex at once, through the cube they span."""
    distance(complex_, x, y)
    system = hyperplane_system(complex_)
    cubes = []
    current = x
    while current != y:
        front = _adjacent_separators(system, current, y)
        cube, current = spanning_cube(complex_, current, front, y)
        cubes.append(cube)
    return cubes


def hyperplane_report(complex_: CubeComplex) -> List[Dict[str, Any]]:
    return [
        {
            "id": oriented.id,
            "edges": [list(e) for e in oriented.edges],
            "plus_size": len(oriented.plus_side),
            "minus_size": len(oriented.minus_side),
            "boundary_plus_size": len(oriented.boundary_plus),
            "boundary_minus_size": len(oriented.boundary_minus),
        }
        for oriented in hyperplane_system(complex_).hyperplanes
    ]
