from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set, Tuple

from cubecocycle.cocycle import Point, cocycle
from cubecocycle.complex_core import CubeComplex, VertexId, distance
from cubecocycle.exceptions import PreconditionError
from cubecocycle.operators import Scalar, SparseOperator
from cubecocycle.utils.log import get_logger

logger = get_logger(__name__)

AUTOMORPHISM_CAP = 5040

Permutation = Tuple[VertexId, ...]


def compose(g: Permutation, h: Permutation) -> Permutation:
    """``(g h)(v) = g(h(v))``."""
    return tuple(g[v] for v in h)


def inverse(g: Permutation) -> Permutation:
    result = [0] * len(g)
    for v, image in enumerate(g):
        result[image] = v
    return tuple(result)


def check_automorphism(complex_: CubeComplex, g: Sequence[int]) -> Permutation:
    """Return ``g`` as a tuple after checking it permutes the cubes.

    Raises:
        PreconditionError: ``g`` is not a permutation of the vertices or
            sends a cube to a non-cube (the cube is the witness).
    """
    g = tuple(int(v) for v in g)
    if sorted(g) != list(range(complex_.n_vertices)):
        raise PreconditionError(
            "group element is not a vertex permutation", witness=g
        )
    for cube in complex_.cubes:
        if frozenset(g[v] for v in cube.vertices) not in complex_.cube_set:
            raise PreconditionError(
                f"permutation does not preserve cube {cube.vertices}",
                witness=list(cube.vertices),
            )
    return g


@dataclass
class GroupAction:
    """Automorphisms of a complex generating a finite group, with a base
    vertex fixing the length ``l(g) = d(x, g x)``."""

    complex_: CubeComplex
    generators: List[Permutation]
    base_point: VertexId = 0
    _elements: Optional[List[Permutation]] = field(default=None, repr=False)

    def __post_init__(self):
        self.generators = [
            check_automorphism(self.complex_, g) for g in self.generators
        ]
        self.complex_.check_vertex(self.base_point)

    @property
    def identity(self) -> Permutation:
        return tuple(range(self.complex_.n_vertices))

    def length(self, g: Permutation) -> int:
        return distance(self.complex_, self.base_point, g[self.base_point])

    def elements(self, cap: int = AUTOMORPHISM_CAP) -> List[Permutation]:
        """Close the generators under composition, stopping at ``cap``."""
        if self._elements is not None and len(self._elements) <= cap:
            return self._elements[:cap]
        seen: Set[Permutation] = {self.identity}
        ordered = [self.identity]
        queue = deque([self.identity])
        while queue and len(ordered) < cap:
            current = queue.popleft()
            for g in self.generators:
                nxt = compose(g, current)
                if nxt not in seen:
                    seen.add(nxt)
                    ordered.append(nxt)
                    queue.append(nxt)
                    if len(ordered) >= cap:
                        logger.info(f"group closure stopped at cap {cap}")
                        break
        self._elements = ordered
        return ordered


def representation(
    action: GroupAction, g: Sequence[int], point: Point
) -> SparseOperator:
    """``pi_z(g) = c_z(x, g x) pi(g)`` with ``x`` the base point."""
    g = check_automorphism(action.complex_, g)
    x = action.base_point
    shift = SparseOperator.permutation(g, point.one)
    return cocycle(action.complex_, x, g[x], point) @ shift


def base_coefficient(
    action: GroupAction, g: Sequence[int], point: Point
) -> Scalar:
    """``<pi_z(g) delta_x, delta_x>`` for the base point ``x``."""
    x = action.base_point
    return representation(action, g, point).entry(x, x)


@dataclass(frozen=True)
class EquivarianceReport:
    g: Permutation
    x: VertexId
    y: VertexId
    deviation: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.deviation <= self.tol


def cocycle_equivariance(
    action: GroupAction,
    g: Sequence[int],
    x: VertexId,
    y: VertexId,
    point: Point,
    tol: Optional[float] = None,
) -> EquivarianceReport:
    """Compare ``pi(g) c(x,y) pi(g)^-1`` with ``c(g x, g y)``.

    Exact points are compared with zero tolerance, float points with
    ``1e-10`` unless ``tol`` is given.
    """
    g = check_automorphism(action.complex_, g)
    if tol is None:
        tol = 0.0 if point.exact else 1e-10
    complex_ = action.complex_
    forward = SparseOperator.permutation(g, point.one)
    backward = SparseOperator.permutation(inverse(g), point.one)
    conjugated = forward @ cocycle(complex_, x, y, point) @ backward
    moved = cocycle(complex_, g[x], g[y], point)
    return EquivarianceReport(
        g, x, y, conjugated.max_deviation(moved), tol
    )


def homomorphism_deviation(
    action: GroupAction, g: Sequence[int], h: Sequence[int], point: Point
) -> float:
    """Distance between ``pi_z(g h)`` and ``pi_z(g) pi_z(h)``."""
    g = check_automorphism(action.complex_, g)
    h = check_automorphism(action.complex_, h)
    product = representation(action, g, point) @ representation(
        action, h, point
    )
    return representation(action, compose(g, h), point).max_deviation(
        product
    )
