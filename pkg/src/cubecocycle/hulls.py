from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from cubecocycle.complex_core import (
    Cube,
    CubeComplex,
    VertexId,
    distance,
)
from cubecocycle.exceptions import ConsistencyError, PreconditionError
from cubecocycle.hyperplanes import (
    HyperplaneLike,
    hyperplane_id,
    hyperplane_system,
)
from cubecocycle.utils.log import get_logger

logger = get_logger(__name__)

BALL_CENTRES = ("y", "x")
AUDIT_COLUMNS = ["family", "n", "x", "y", "k", "count", "bound", "pass"]


@dataclass(frozen=True)
class ConvexHull:
    generators: FrozenSet[VertexId]
    members: FrozenSet[VertexId]

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Ball:
    center: VertexId
    radius: int
    members: FrozenSet[VertexId]

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.members

    def __len__(self) -> int:
        return len(self.members)


def hull_mask(
    complex_: CubeComplex, vertices: Iterable[VertexId]
) -> np.ndarray:
    """Bool mask of the intersection of all half-spaces containing
    ``vertices``."""
    generators = sorted(set(vertices))
    if not generators:
        raise PreconditionError("convex hull of the empty set")
    for v in generators:
        complex_.check_vertex(v)
    plus = hyperplane_system(complex_).plus
    if plus.shape[0] == 0:
        return np.ones(complex_.n_vertices, dtype=bool)
    sides = plus[:, generators]
    all_plus = sides.all(axis=1)
    all_minus = (~sides).all(axis=1)
    outside = (all_plus[:, None] & ~plus) | (all_minus[:, None] & plus)
    return ~outside.any(axis=0)


def convex_hull(
    complex_: CubeComplex, vertices: Iterable[VertexId]
) -> ConvexHull:
    generators = frozenset(vertices)
    mask = hull_mask(complex_, generators)
    return ConvexHull(
        generators, frozenset(int(v) for v in np.flatnonzero(mask))
    )


def interval_by_geodesics(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> FrozenSet[VertexId]:
    """Vertices on some geodesic from ``x`` to ``y``, from distance sums."""
    total = distance(complex_, x, y)
    dist = complex_.distances
    return frozenset(
        int(v) for v in np.flatnonzero(dist[x] + dist[y] == total)
    )


def ball(complex_: CubeComplex, center: VertexId, radius: int) -> Ball:
    complex_.check_vertex(center)
    dist = complex_.distances[center]
    members = np.flatnonzero((dist >= 0) & (dist <= radius))
    return Ball(center, radius, frozenset(int(v) for v in members))


def interval_ball_bound(complex_: CubeComplex, k: int) -> int:
    return (k + 1) ** complex_.dim


def interval_ball_count(
    complex_: CubeComplex,
    x: VertexId,
    y: VertexId,
    k: int,
    centre: str = "y",
    strict: bool = True,
) -> int:
    """Count the vertices of the interval from ``x`` to ``y`` within
    distance ``k`` of ``y`` (or of ``x`` with ``centre="x"``).

    Raises:
        ConsistencyError: With ``strict``, when the count exceeds
            ``(k+1)^dim``.
    """
    if centre not in BALL_CENTRES:
        raise PreconditionError(f"ball centre must be one of {BALL_CENTRES}")
    distance(complex_, x, y)
    mask = hull_mask(complex_, (x, y))
    dist = complex_.distances[y if centre == "y" else x]
    count = int(np.count_nonzero(mask & (dist <= k)))
    bound = interval_ball_bound(complex_, k)
    if strict and count > bound:
        raise ConsistencyError(
            f"interval {x}..{y} meets the radius-{k} ball in {count} "
            f"vertices, more than {bound}",
            witness={"x": x, "y": y, "k": k, "count": count},
        )
    return count


def cube_absorb(
    complex_: CubeComplex, x: VertexId, y: VertexId, b: VertexId, cube: Cube
) -> VertexId:
    """The corner ``c`` of ``cube`` whose interval from ``x`` swallows the
    hull of ``x``, ``y`` and ``b``.

    ``c`` is found by crossing, from ``y``, exactly the hyperplanes that
    separate ``b`` from ``y`` but not ``x`` from ``y``.

    Args:
        complex_ (CubeComplex): A validated complex.
        x (int): Outer vertex.
        y (int): Corner of ``cube``.
        b (int): Corner of ``cube``.
        cube (Cube): The cube.

    Raises:
        PreconditionError: ``y`` or ``b`` is not a vertex of ``cube``.
        ConsistencyError: The inclusion fails.

    Returns:
        int: The vertex ``c``.
    """
    for v in (y, b):
        if v not in cube:
            raise PreconditionError(
                f"vertex {v} is not in cube {cube.vertices}", witness=v
            )
    system = hyperplane_system(complex_)
    wanted = system.separating(b, y) & ~system.separating(x, y)
    corner = next(
        (
            v
            for v in cube.vertices
            if np.array_equal(system.separating(y, v), wanted)
        ),
        None,
    )
    if corner is None:
        raise ConsistencyError(
            f"no corner of {cube.vertices} realises the absorbing "
            f"separator set",
            witness={"x": x, "y": y, "b": b},
        )
    inner = hull_mask(complex_, (x, y, b))
    outer = hull_mask(complex_, (x, corner))
    if np.any(inner & ~outer):
        raise ConsistencyError(
            f"hull of {(x, y, b)} is not inside the interval {x}..{corner}",
            witness={"x": x, "y": y, "b": b, "c": corner},
        )
    return corner


@dataclass(frozen=True)
class IntervalDecomposition:
    """Split of an interval along a hyperplane adjacent to ``x``.

    ``near`` is the interval from ``x`` to ``v``; ``far`` the interval from
    the vertex across the hyperplane to ``y``. The flags record which of
    the expected properties held.
    """

    hyperplane: int
    v: VertexId
    x_opposite: VertexId
    near: FrozenSet[VertexId]
    far: FrozenSet[VertexId]
    forward_inclusion: bool
    equality: bool
    disjoint: bool
    thin: bool
    lone_front: bool
    separators_miss_hyperplane: bool

    @property
    def holds(self) -> bool:
        return all(
            (
                self.forward_inclusion,
                self.equality,
                self.disjoint,
                self.thin,
                self.lone_front,
                self.separators_miss_hyperplane,
            )
        )

    def flags(self) -> Dict[str, bool]:
        return {
            "forward_inclusion": self.forward_inclusion,
            "equality": self.equality,
            "disjoint": self.disjoint,
            "thin": self.thin,
            "lone_front": self.lone_front,
            "separators_miss_hyperplane": self.separators_miss_hyperplane,
        }


def decompose_interval(
    complex_: CubeComplex,
    x: VertexId,
    y: VertexId,
    hyperplane: HyperplaneLike,
    strict: bool = False,
) -> IntervalDecomposition:
    """Decompose the interval ``x..y`` along ``hyperplane``.

    ``v`` is the member of the interval on ``x``'s side of the hyperplane
    farthest from ``x`` (smallest id on ties).

    Args:
        complex_ (CubeComplex): A validated complex.
        x (int): Start vertex, adjacent to ``hyperplane``.
        y (int): End vertex.
        hyperplane (HyperplaneLike): A hyperplane separating ``x``, ``y``.
        strict (bool, optional): Raise when a property fails.

    Raises:
        PreconditionError: ``hyperplane`` does not separate ``x`` from
            ``y`` or is not adjacent to ``x``.
        ConsistencyError: With ``strict``, when a property fails.

    Returns:
        IntervalDecomposition: The decomposition and its flags.
    """
    system = hyperplane_system(complex_)
    h = hyperplane_id(hyperplane)
    if system.plus[h, x] == system.plus[h, y]:
        raise PreconditionError(
            f"hyperplane {h} does not separate {x} from {y}", witness=h
        )
    if not system.adjacent[h, x]:
        raise PreconditionError(
            f"hyperplane {h} is not adjacent to {x}", witness=h
        )
    dist = complex_.distances
    interval = hull_mask(complex_, (x, y))
    near_side = system.plus[h] == system.plus[h, x]
    candidates = np.flatnonzero(interval & near_side)
    farthest = dist[x, candidates].max()
    v = int(candidates[dist[x, candidates] == farthest].min())
    x_opposite = int(system.partner[h, x])

    near = hull_mask(complex_, (x, v))
    far = hull_mask(complex_, (x_opposite, y))
    union = near | far
    thin = bool(np.all(system.adjacent[h, candidates]))

    front = system.separating(v, y) & system.adjacent[:, v]
    lone_front = [int(k) for k in np.flatnonzero(front)] == [h]

    beyond = [k for k in system.separator_ids(v, y) if k != h]
    separators_miss = not any(system.crosses(h, k) for k in beyond)

    decomposition = IntervalDecomposition(
        hyperplane=h,
        v=v,
        x_opposite=x_opposite,
        near=frozenset(int(u) for u in np.flatnonzero(near)),
        far=frozenset(int(u) for u in np.flatnonzero(far)),
        forward_inclusion=bool(np.all(union[interval])),
        equality=bool(np.array_equal(union, interval)),
        disjoint=not bool(np.any(near & far)),
        thin=thin,
        lone_front=lone_front,
        separators_miss_hyperplane=separators_miss,
    )
    if not decomposition.holds:
        logger.debug(
            f"decomposition of {x}..{y} along {h}: {decomposition.flags()}"
        )
        if strict:
            raise ConsistencyError(
                f"interval decomposition of {x}..{y} along {h} fails",
                witness=decomposition.flags(),
            )
    return decomposition


def bound_audit_frame(
    complex_: CubeComplex,
    family: str,
    pairs: Optional[Iterable[Tuple[VertexId, VertexId]]] = None,
    centre: str = "y",
) -> pd.DataFrame:
    """Interval/ball counts against ``(k+1)^dim`` for every ``k`` up to
    ``d(x,y)``, one row per ``(x, y, k)``."""
    if centre not in BALL_CENTRES:
        raise PreconditionError(f"ball centre must be one of {BALL_CENTRES}")
    n = complex_.n_vertices
    if pairs is None:
        pairs = ((x, y) for x in range(n) for y in range(n))
    dist = complex_.distances
    rows: List[Dict[str, Any]] = []
    for x, y in pairs:
        total = distance(complex_, x, y)
        mask = hull_mask(complex_, (x, y))
        radii = dist[y if centre == "y" else x][mask]
        cumulative = np.cumsum(np.bincount(radii, minlength=total + 1))
        for k in range(total + 1):
            count = int(cumulative[k])
            bound = interval_ball_bound(complex_, k)
            rows.append(
                {
                    "family": family,
                    "n": n,
                    "x": x,
                    "y": y,
                    "k": k,
                    "count": count,
                    "bound": bound,
                    "pass": count <= bound,
                }
            )
    return pd.DataFrame(rows, columns=AUDIT_COLUMNS)
