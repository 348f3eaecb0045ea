from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from cubecocycle.complex_core import (
    PATH_CAP,
    CubeComplex,
    EdgePath,
    VertexId,
    all_geodesics,
    check_path,
    distance,
    some_geodesic,
)
from cubecocycle.exceptions import ConsistencyError, PreconditionError
from cubecocycle.hulls import hull_mask
from cubecocycle.hyperplanes import crossing_sequence, hyperplane_system
from cubecocycle.operators import SparseOperator
from cubecocycle.utils.log import get_logger
from cubecocycle.zw import (
    SYMBOLIC,
    CirclePoint,
    SignedMonomial,
    SymbolicPoint,
    ZWPolynomial,
    rational_points,
)

logger = get_logger(__name__)

Point = Union[CirclePoint, SymbolicPoint]


def elementary(
    complex_: CubeComplex, x: VertexId, y: VertexId, point: Point
) -> SparseOperator:
    """The operator attached to the edge ``x -> y``.

    With ``H`` the hyperplane of the edge, each pair ``(delta_v,
    delta_v')`` with ``v`` adjacent to ``H`` on ``x``'s side and ``v'`` its
    partner across ``H`` is rotated by ``[[w, z], [-z, w]]``; every other
    basis vector is fixed.

    Raises:
        PreconditionError: ``x`` and ``y`` are not adjacent.
    """
    if not complex_.is_edge(x, y):
        raise PreconditionError(
            f"{x} and {y} are not adjacent", witness=(x, y)
        )
    system = hyperplane_system(complex_)
    h = system.edge_label[frozenset((x, y))]
    x_side = system.plus[h, x]
    z, w = point.z, point.w
    columns = {}
    for a, b in system[h].edges:
        v, partner = (a, b) if system.plus[h, a] == x_side else (b, a)
        columns[v] = {v: w, partner: -z}
        columns[partner] = {partner: w, v: z}
    return SparseOperator(complex_.n_vertices, columns, point.one)


def cocycle_along(
    complex_: CubeComplex, path: EdgePath, point: Point
) -> SparseOperator:
    """Product of the elementary operators along an arbitrary edge-path."""
    check_path(complex_, path)
    result = SparseOperator.identity(complex_.n_vertices, point.one)
    for u, v in path.edges():
        result = result @ elementary(complex_, u, v, point)
    return result


def cocycle(
    complex_: CubeComplex, x: VertexId, y: VertexId, point: Point
) -> SparseOperator:
    return cocycle_along(complex_, some_geodesic(complex_, x, y), point)


def cocycle_symbolic(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> SparseOperator:
    """Cocycle with entries in the free ring on ``z`` and ``w``."""
    return cocycle(complex_, x, y, SYMBOLIC)


@dataclass(frozen=True)
class CoefficientEntry:
    a: VertexId
    b: VertexId
    polynomial: ZWPolynomial
    monomial: Optional[SignedMonomial]
    method: str

    def to_dict(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "a": self.a,
            "b": self.b,
            "polynomial": str(self.polynomial),
            "method": self.method,
        }
        if self.monomial is not None:
            record.update(self.monomial.to_dict())
        return record


def _solve_monomial(
    polynomial: ZWPolynomial,
    points: List[CirclePoint],
    max_k: int,
    max_ell: int,
) -> Optional[SignedMonomial]:
    values = [p.evaluate(polynomial) for p in points]
    for k in range(max_k + 1):
        for ell in range(max_ell + 1):
            for sign in (1, -1):
                if all(
                    value == sign * p.z**k * p.w**ell
                    for value, p in zip(values, points)
                ):
                    return SignedMonomial(sign, k, ell)
    return None


def coefficient_table(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> List[CoefficientEntry]:
    """Nonzero entries of the symbolic cocycle as signed monomials.

    An entry that is not a single monomial in the free ring is evaluated
    exactly at ``2*dim + d(x,y) + 2`` rational circle points and matched
    against every ``±z^k w^ell`` with ``k <= d(x,y)``; entries that vanish
    on the circle are dropped.

    Raises:
        ConsistencyError: An entry matches no signed monomial.
    """
    total = distance(complex_, x, y)
    symbolic = cocycle_symbolic(complex_, x, y)
    points: Optional[List[CirclePoint]] = None
    entries = []
    for a, b, polynomial in symbolic.nonzero_entries():
        monomial = polynomial.as_monomial()
        method = "monomial"
        if monomial is None:
            if points is None:
                points = rational_points(2 * complex_.dim + total + 2)
                logger.info(
                    f"non-monomial entry at {(a, b)} of c({x},{y}); "
                    f"falling back to {len(points)} rational points"
                )
            if all(p.evaluate(polynomial) == 0 for p in points):
                continue
            monomial = _solve_monomial(
                polynomial, points, total, 2 * complex_.dim + total
            )
            method = "fallback"
            if monomial is None:
                raise ConsistencyError(
                    f"entry {(a, b)} of c({x},{y}) is not a signed monomial",
                    witness={"a": a, "b": b, "entry": str(polynomial)},
                )
        entries.append(CoefficientEntry(a, b, polynomial, monomial, method))
    return entries


@dataclass
class PathIndependenceReport:
    x: VertexId
    y: VertexId
    paths_checked: int
    truncated: bool
    detour_checked: bool
    counterexample: Optional[Tuple[EdgePath, EdgePath]] = None

    @property
    def agree(self) -> bool:
        return self.counterexample is None


def verify_path_independence(
    complex_: CubeComplex,
    x: VertexId,
    y: VertexId,
    paths: Optional[Iterable[EdgePath]] = None,
    points: Optional[List[CirclePoint]] = None,
    cap: int = PATH_CAP,
) -> PathIndependenceReport:
    """Compare the cocycle along several edge-paths from ``x`` to ``y``.

    Defaults to every geodesic (the first ``cap`` in lexicographic order)
    plus the reference geodesic with a back-and-forth detour spliced in at
    ``x``. Comparison is exact at rational points.
    """
    points = points or rational_points(2)
    reference = some_geodesic(complex_, x, y)
    truncated = False
    if paths is None:
        candidates = list(all_geodesics(complex_, x, y, cap=cap + 1))
        truncated = len(candidates) > cap
        candidates = candidates[:cap]
    else:
        candidates = list(paths)
    detour_checked = False
    if complex_.adjacency[x]:
        step = complex_.adjacency[x][0]
        candidates.append(
            EdgePath((x, step) + reference.vertices)
        )
        detour_checked = True

    report = PathIndependenceReport(
        x, y, len(candidates), truncated, detour_checked
    )
    for point in points:
        expected = cocycle_along(complex_, reference, point)
        for path in candidates:
            if path.start != x or path.end != y:
                raise PreconditionError(
                    f"path {path.vertices} does not run from {x} to {y}"
                )
            if not cocycle_along(complex_, path, point).equals(expected):
                report.counterexample = (reference, path)
                logger.debug(f"path dependence: {reference} vs {path}")
                return report
    return report


@dataclass
class CoefficientTrace:
    """How the predicted entry at ``(a, b)`` was assembled.

    ``positions`` are the places of the separators of ``a``, ``b`` in the
    crossing order of the reference geodesic (1-based), ``chain`` the
    successive reflections of ``a``, ``ells`` the ``w``-exponent
    contributions and ``flips`` the steps contributing a sign.
    """

    a: VertexId
    b: VertexId
    in_support: bool
    positions: List[int] = field(default_factory=list)
    chain: List[VertexId] = field(default_factory=list)
    ells: List[int] = field(default_factory=list)
    flips: List[int] = field(default_factory=list)
    monomial: Optional[SignedMonomial] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": self.a,
            "b": self.b,
            "in_support": self.in_support,
            "positions": self.positions,
            "chain": self.chain,
            "ells": self.ells,
            "flips": self.flips,
            "monomial": (
                None if self.monomial is None else self.monomial.to_dict()
            ),
        }


def explain_coefficient(
    complex_: CubeComplex,
    x: VertexId,
    y: VertexId,
    a: VertexId,
    b: VertexId,
) -> CoefficientTrace:
    """Predict the entry ``<c(x,y) delta_b, delta_a>`` combinatorially.

    The separators of ``a`` and ``b`` are taken in the order the reference
    geodesic from ``x`` to ``y`` crosses them, and ``a`` is reflected
    across them one after another, which must land on ``b``. The exponent
    of ``w`` counts, for each intermediate vertex, the separators of ``x``
    and ``y`` strictly between consecutive reflections that are adjacent
    to it. Each reflection landing on ``x``'s side contributes a sign.

    Args:
        complex_ (CubeComplex): A validated complex.
        x (int): Start of the cocycle.
        y (int): End of the cocycle.
        a (int): Row.
        b (int): Column.

    Raises:
        ConsistencyError: The reflection chain breaks off or misses ``b``
            although ``a`` lies in the hull of ``x``, ``y`` and ``b``.

    Returns:
        CoefficientTrace: The trace; ``monomial`` is None for a zero entry.
    """
    system = hyperplane_system(complex_)
    trace = CoefficientTrace(a, b, in_support=False)
    if not hull_mask(complex_, (x, y, b))[a]:
        return trace
    order = crossing_sequence(complex_, some_geodesic(complex_, x, y))
    position = {h: i + 1 for i, h in enumerate(order)}
    separating = system.separator_ids(a, b)
    if any(h not in position for h in separating):
        return trace
    trace.in_support = True
    trace.positions = sorted(position[h] for h in separating)

    current = a
    trace.chain = [a]
    for j, n_j in enumerate(trace.positions, start=1):
        h = order[n_j - 1]
        if not system.adjacent[h, current]:
            raise ConsistencyError(
                f"reflection chain from {a} to {b} breaks at hyperplane "
                f"{h}",
                witness=trace.to_dict(),
            )
        current = int(system.partner[h, current])
        trace.chain.append(current)
        if system.plus[h, current] == system.plus[h, x]:
            trace.flips.append(j)
    if current != b:
        raise ConsistencyError(
            f"reflection chain from {a} ends at {current}, not {b}",
            witness=trace.to_dict(),
        )

    bounds = [0] + trace.positions + [len(order) + 1]
    for j, vertex in enumerate(trace.chain):
        trace.ells.append(
            sum(
                1
                for k in range(bounds[j] + 1, bounds[j + 1])
                if system.adjacent[order[k - 1], vertex]
            )
        )
    trace.monomial = SignedMonomial(
        (-1) ** len(trace.flips), len(trace.positions), sum(trace.ells)
    )
    return trace


def predict_coefficient(
    complex_: CubeComplex,
    x: VertexId,
    y: VertexId,
    a: VertexId,
    b: VertexId,
) -> Optional[SignedMonomial]:
    return explain_coefficient(complex_, x, y, a, b).monomial


@dataclass
class KDecomposition:
    """``c(x,y) = sum_k z^k c_k`` with ``c_k`` entries in ``{0, ±w^ell}``.

    ``components[k]`` holds ``c_k`` with ``ZWPolynomial`` entries in ``w``
    alone; only ``c_0`` acts as the identity off the support.
    """

    x: VertexId
    y: VertexId
    distance: int
    dim: int
    components: List[SparseOperator]

    def count_bound(self, k: int) -> int:
        return (k + self.dim + 1) ** self.dim

    def max_row_count(self, k: int) -> int:
        return max(self._row_counts(k).values(), default=0)

    def max_column_count(self, k: int) -> int:
        return max(self._column_counts(k).values(), default=0)

    def _row_counts(self, k: int) -> Dict[int, int]:
        component = self.components[k]
        counts = component.row_counts()
        if component.identity_off_support:
            for v in range(component.n):
                if v not in component.columns:
                    counts[v] = counts.get(v, 0) + 1
        return counts

    def _column_counts(self, k: int) -> Dict[int, int]:
        component = self.components[k]
        counts = component.column_counts()
        if component.identity_off_support:
            for v in range(component.n):
                counts.setdefault(v, 1)
        return counts

    def vanishes_beyond_distance(self) -> bool:
        return all(c.is_zero() for c in self.components[self.distance + 1 :])

    def vanishes_from_distance(self) -> bool:
        return all(c.is_zero() for c in self.components[self.distance :])


def k_decomposition(
    complex_: CubeComplex, x: VertexId, y: VertexId
) -> KDecomposition:
    """Split the symbolic cocycle by powers of ``z``.

    One zero component past ``d(x,y)`` is always included so that both
    readings of the vanishing statement can be checked.
    """
    total = distance(complex_, x, y)
    table = coefficient_table(complex_, x, y)
    top = max([total + 1] + [e.monomial.k for e in table])
    components = [
        SparseOperator(
            complex_.n_vertices,
            {},
            ZWPolynomial.one(),
            identity_off_support=(k == 0),
        )
        for k in range(top + 1)
    ]
    support = {e.b for e in table} | set(
        cocycle_symbolic(complex_, x, y).columns
    )
    components[0].columns.update({b: {} for b in support})
    for entry in table:
        m = entry.monomial
        column = components[m.k].columns.setdefault(entry.b, {})
        column[entry.a] = ZWPolynomial.monomial(m.sign, 0, m.ell)
    return KDecomposition(x, y, total, complex_.dim, components)


@dataclass(frozen=True)
class NormBounds:
    general: float
    tree: Optional[float] = None

    @property
    def best(self) -> float:
        if self.tree is None:
            return self.general
        return min(self.general, self.tree)


def norm_bound(
    complex_: CubeComplex, x: VertexId, y: VertexId, z_abs: float
) -> NormBounds:
    """Upper bounds for the norm of ``c(x,y)`` at ``|z| = z_abs``:
    ``2^d * sum_{k <= d(x,y)} |z|^k (k+d+1)^d`` and, in dimension one,
    ``4 / (1 - |z|)``."""
    if not 0 <= z_abs < 1:
        raise PreconditionError(f"|z| = {z_abs} must lie in [0, 1)")
    d = complex_.dim
    total = distance(complex_, x, y)
    k = np.arange(total + 1)
    general = float(2**d * np.sum(z_abs**k * (k + d + 1.0) ** d))
    tree = 4.0 / (1.0 - z_abs) if d == 1 else None
    return NormBounds(general, tree)


def adjoint_deviation(
    complex_: CubeComplex, x: VertexId, y: VertexId, point: CirclePoint
) -> float:
    """Distance between ``c_z(x,y)`` and ``c_{conj z}(y,x)^*``."""
    forward = cocycle(complex_, x, y, point)
    backward = cocycle(complex_, y, x, point.conjugate()).adjoint()
    return forward.max_deviation(backward)


def holomorphy_deviation(
    complex_: CubeComplex, x: VertexId, y: VertexId, point: CirclePoint
) -> float:
    """Distance between the numeric cocycle and the symbolic one evaluated
    at ``point``."""
    numeric = cocycle(complex_, x, y, point)
    evaluated = cocycle_symbolic(complex_, x, y).map(
        lambda p: p.evaluate(point.z, point.w), one=point.one
    )
    return numeric.max_deviation(evaluated)
