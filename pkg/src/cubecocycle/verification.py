"""Verification suite: every structural statement the cocycle construction
rests on, checked instance by instance on a concrete complex."""

import concurrent.futures
import os
import threading
import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tinydb import TinyDB
from tqdm import tqdm

import cubecocycle
from cubecocycle.cocycle import (
    CoefficientEntry,
    KDecomposition,
    adjoint_deviation,
    coefficient_table,
    cocycle,
    explain_coefficient,
    holomorphy_deviation,
    k_decomposition,
    norm_bound,
    predict_coefficient,
    verify_path_independence,
)
from cubecocycle.complex_core import (
    PATH_CAP,
    CubeComplex,
    EdgePath,
    all_geodesics,
    corner_move_closure,
    is_geodesic,
    jsonable,
    reduce_path,
    replay_moves,
    some_geodesic,
    square_completion,
    validate,
)
from cubecocycle.exceptions import CubeComplexError
from cubecocycle.hulls import (
    bound_audit_frame,
    cube_absorb,
    decompose_interval,
    hull_mask,
)
from cubecocycle.hyperplanes import (
    compute_hyperplanes,
    crossing_sequence,
    fronted_geodesic,
    hyperplane_system,
    intersects,
    normal_cube_path,
    parallel_component_count,
    spanning_cube,
)
from cubecocycle.operators import (
    SparseOperator,
    operator_norm,
    unitarity_defect,
)
from cubecocycle.representation import (
    AUTOMORPHISM_CAP,
    GroupAction,
    Permutation,
    base_coefficient,
    cocycle_equivariance,
    homomorphism_deviation,
)
from cubecocycle.utils.log import get_logger
from cubecocycle.zw import CirclePoint, rational_points, z_grid

logger = get_logger(__name__)

REPORT_SCHEMA_VERSION = "1.0"
DEFAULT_MAX_PAIRS = 400
DEFAULT_EXACT_POINTS = 5
DEFAULT_FLOAT_POINTS = tuple(
    p.z for p in z_grid(4, 5, 0.9, include_zero=False)
)
DEFAULT_NORM_GRID = (3, 4, 0.95)
FLOAT_TOL = 1e-10
NORM_SLACK = 1e-9
REAL_Z = (-0.75, -0.5, -0.25, 0.25, 0.5, 0.75)
# |z| = 0.1, 0.2, ..., 0.9 at three angles
TREE_NORM_GRID = (9, 3, 0.9)

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_ERROR = "error"


@dataclass
class CheckRecord:
    check: str
    anchor: str
    instance: Dict[str, Any]
    status: str
    witness: Any = None
    details: Any = None

    def to_dict(self) -> Dict[str, Any]:
        record = {
            "check": self.check,
            "anchor": self.anchor,
            "instance": jsonable(self.instance),
            "status": self.status,
        }
        if self.witness is not None:
            record["witness"] = jsonable(self.witness)
        if self.details is not None:
            record["details"] = jsonable(self.details)
        return record


@dataclass
class Report:
    command: str
    config: Dict[str, Any]
    records: List[CheckRecord] = field(default_factory=list)
    sampling: Dict[str, Any] = field(default_factory=dict)
    partial: bool = False
    version: str = cubecocycle.__version__

    @property
    def passed(self) -> bool:
        return all(r.status == STATUS_PASS for r in self.records)

    def summary(self) -> Dict[str, Any]:
        by_check: Dict[str, Dict[str, int]] = {}
        totals = {STATUS_PASS: 0, STATUS_FAIL: 0, STATUS_ERROR: 0}
        for record in self.records:
            totals[record.status] += 1
            counts = by_check.setdefault(
                record.check, {STATUS_PASS: 0, STATUS_FAIL: 0, STATUS_ERROR: 0}
            )
            counts[record.status] += 1
        return {"total": len(self.records), **totals, "by_check": by_check}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "version": self.version,
            "command": self.command,
            "config": jsonable(self.config),
            "summary": self.summary(),
            "sampling": jsonable(self.sampling),
            "partial": self.partial,
            "records": [r.to_dict() for r in self.records],
        }

    def save(self, path: str):
        """Store the report in a TinyDB file with a ``meta`` document and
        one ``checks`` document per record."""
        folder = os.path.dirname(path)
        if folder and not os.path.exists(folder):
            os.makedirs(folder, exist_ok=True)
        document = self.to_dict()
        records = document.pop("records")
        with TinyDB(path, indent=4, ensure_ascii=False) as db:
            db.drop_tables()
            db.table("meta").insert(document)
            db.table("checks").insert_multiple(records)
        logger.info(f"Saved {len(records)} records to {path}")

    @classmethod
    def load(cls, path: str) -> "Report":
        with TinyDB(path) as db:
            meta = db.table("meta").all()
            checks = db.table("checks").all()
        if not meta:
            raise CubeComplexError(f"no report stored in {path}")
        head = meta[0]
        records = [
            CheckRecord(
                check=r["check"],
                anchor=r["anchor"],
                instance=r["instance"],
                status=r["status"],
                witness=r.get("witness"),
                details=r.get("details"),
            )
            for r in checks
        ]
        return cls(
            command=head["command"],
            config=head["config"],
            records=records,
            sampling=head.get("sampling", {}),
            partial=head.get("partial", False),
            version=head.get("version", ""),
        )


@dataclass
class SuiteConfig:
    max_pairs: int = DEFAULT_MAX_PAIRS
    seed: int = 0
    jobs: int = os.cpu_count() or 1
    exact_points: int = DEFAULT_EXACT_POINTS
    float_points: Tuple[complex, ...] = DEFAULT_FLOAT_POINTS
    norm_points: Optional[Tuple[complex, ...]] = None
    path_cap: int = PATH_CAP
    group_cap: int = 64
    progress: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_pairs": self.max_pairs,
            "seed": self.seed,
            "jobs": self.jobs,
            "exact_points": self.exact_points,
            "float_points": [
                [complex(z).real, complex(z).imag] for z in self.float_points
            ],
            "path_cap": self.path_cap,
            "group_cap": self.group_cap,
        }


def _sample(
    items: Sequence[Any], cap: int, rng: np.random.Generator
) -> Tuple[List[Any], bool]:
    if len(items) <= cap:
        return list(items), False
    chosen = sorted(rng.choice(len(items), size=cap, replace=False).tolist())
    return [items[i] for i in chosen], True


def sample_pairs(
    n_vertices: int, cap: int, seed: int = 0
) -> Tuple[List[Tuple[int, int]], bool]:
    """All ordered vertex pairs, or a seeded sample of ``cap`` of them
    kept in lexicographic order. The flag tells whether sampling took
    place."""
    pairs = [(x, y) for x in range(n_vertices) for y in range(n_vertices)]
    return _sample(pairs, cap, np.random.default_rng(seed))


class SuiteContext:
    """Shared, read-only inputs of one suite run plus memoised cocycle
    data per pair."""

    def __init__(
        self,
        complex_: CubeComplex,
        family: str,
        config: SuiteConfig,
        action: Optional[GroupAction] = None,
    ):
        self.complex_ = complex_
        self.family = family
        self.config = config
        self.action = action
        n = complex_.n_vertices
        rng = np.random.default_rng(config.seed)

        all_pairs = [(x, y) for x in range(n) for y in range(n)]
        self.pairs, pairs_sampled = _sample(all_pairs, config.max_pairs, rng)
        self.quads = [
            tuple(int(v) for v in rng.integers(n, size=4))
            for _ in range(min(config.max_pairs, n**4))
        ]
        self.exact_points = rational_points(config.exact_points)
        self.float_points = [
            CirclePoint.from_z(z) for z in config.float_points
        ]
        self.norm_points = (
            [CirclePoint.from_z(z) for z in config.norm_points]
            if config.norm_points is not None
            else z_grid(*DEFAULT_NORM_GRID)
        )
        self.tree_points = z_grid(*TREE_NORM_GRID, include_zero=False)
        self.real_points = [CirclePoint.from_z(z) for z in REAL_Z]

        self.elements: List[Permutation] = []
        if action is not None and action.generators:
            cap = min(config.group_cap, AUTOMORPHISM_CAP)
            self.elements = action.elements(cap)

        self.hyperplane_pairs: List[Tuple[int, int]] = []
        self.sampling: Dict[str, Any] = {
            "seed": config.seed,
            "pairs_total": len(all_pairs),
            "pairs_checked": len(self.pairs),
            "pairs_sampled": pairs_sampled,
            "quads_checked": len(self.quads),
            "group_elements": len(self.elements),
        }
        self._lock = threading.Lock()
        self._tables: Dict[Tuple[int, int], List[CoefficientEntry]] = {}
        self._decompositions: Dict[Tuple[int, int], KDecomposition] = {}

    def prepare_hyperplanes(self):
        count = len(hyperplane_system(self.complex_))
        pairs = [(h, k) for h in range(count) for k in range(h + 1, count)]
        rng = np.random.default_rng(self.config.seed + 1)
        self.hyperplane_pairs, sampled = _sample(
            pairs, self.config.max_pairs, rng
        )
        self.sampling["hyperplane_pairs_checked"] = len(self.hyperplane_pairs)
        self.sampling["hyperplane_pairs_sampled"] = sampled

    def table(self, x: int, y: int) -> List[CoefficientEntry]:
        key = (x, y)
        with self._lock:
            cached = self._tables.get(key)
        if cached is None:
            cached = coefficient_table(self.complex_, x, y)
            with self._lock:
                self._tables[key] = cached
        return cached

    def decomposition(self, x: int, y: int) -> KDecomposition:
        key = (x, y)
        with self._lock:
            cached = self._decompositions.get(key)
        if cached is None:
            cached = k_decomposition(self.complex_, x, y)
            with self._lock:
                self._decompositions[key] = cached
        return cached

    def third_vertex(self, x: int, y: int) -> int:
        return (x + 2 * y + 1) % self.complex_.n_vertices

    @property
    def dist(self) -> np.ndarray:
        return self.complex_.distances

    @property
    def is_tree(self) -> bool:
        return self.complex_.dim == 1


Outcome = Tuple[bool, Any]
CheckFn = Callable[[SuiteContext, Dict[str, Any]], Outcome]


@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    scope: str
    fn: CheckFn
    applies: Callable[[SuiteContext], bool] = lambda ctx: True


# complex scope


def _validate(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    report = validate(ctx.complex_, seed=ctx.config.seed)
    return report.valid, report.to_dict()


def _two_sided(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    hyperplanes = compute_hyperplanes(ctx.complex_)
    return True, {"hyperplanes": len(hyperplanes)}


def _no_self_cross(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    system = hyperplane_system(ctx.complex_)
    for v in range(ctx.complex_.n_vertices):
        labels = [
            system.edge_label[frozenset((v, u))]
            for u in ctx.complex_.adjacency[v]
        ]
        if len(set(labels)) != len(labels):
            return False, {"vertex": v, "hyperplanes": labels}
    return True, None


def _intersection_in_square(
    ctx: SuiteContext, inst: Dict[str, Any]
) -> Outcome:
    system = hyperplane_system(ctx.complex_)
    for v in range(ctx.complex_.n_vertices):
        adjacent = system.adjacent_to(v)
        for i, h in enumerate(adjacent):
            for k in adjacent[i + 1 :]:
                if not intersects(ctx.complex_, h, k):
                    continue
                a, b = int(system.partner[h, v]), int(system.partner[k, v])
                if square_completion(ctx.complex_, a, v, b) is None:
                    return False, {"vertex": v, "hyperplanes": [h, k]}
    return True, None


# pair scope: complex core


def _distance_separators(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    count = len(hyperplane_system(ctx.complex_).separator_ids(x, y))
    d = int(ctx.dist[x, y])
    return d == count, {"distance": d, "separators": count}


def _geodesic_characterisations(
    ctx: SuiteContext, inst: Dict[str, Any]
) -> Outcome:
    x, y = inst["x"], inst["y"]
    dist = ctx.dist
    system = hyperplane_system(ctx.complex_)
    on_geodesic = dist[x] + dist[y] == dist[x, y]
    separating = system.separating(x, y)
    sides = system.plus != system.plus[:, [x]]
    nested = ~(sides & ~separating[:, None]).any(axis=0)
    hull = hull_mask(ctx.complex_, (x, y))
    readings = {"distance_sum": on_geodesic, "nested": nested, "hull": hull}
    geodesics = list(
        all_geodesics(ctx.complex_, x, y, cap=ctx.config.path_cap + 1)
    )
    if len(geodesics) <= ctx.config.path_cap:
        union = np.zeros(ctx.complex_.n_vertices, dtype=bool)
        for path in geodesics:
            union[list(path.vertices)] = True
        readings["geodesic_union"] = union
    reference = readings["distance_sum"]
    for name, mask in readings.items():
        if not np.array_equal(mask, reference):
            diff = np.flatnonzero(mask != reference)
            return False, {"reading": name, "vertices": diff.tolist()}
    return True, {"readings": sorted(readings)}


def _corner_moves_connect(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    cap = ctx.config.path_cap
    geodesics = set(all_geodesics(ctx.complex_, x, y, cap=cap + 1))
    if len(geodesics) > cap:
        return True, {"skipped": f"more than {cap} geodesics"}
    start = some_geodesic(ctx.complex_, x, y)
    closure = corner_move_closure(ctx.complex_, start, cap=cap + 1)
    if closure != geodesics:
        missing = geodesics - closure
        return False, {"unreached": sorted(p.vertices for p in missing)}
    return True, {"geodesics": len(geodesics)}


def _reduce_path(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    m = (7 * x + 13 * y) % ctx.complex_.n_vertices
    detour = EdgePath(
        some_geodesic(ctx.complex_, x, m).vertices
        + some_geodesic(ctx.complex_, m, y).vertices[1:]
    )
    reduced, moves = reduce_path(ctx.complex_, detour)
    ok = (
        reduced.start == x
        and reduced.end == y
        and is_geodesic(ctx.complex_, reduced)
        and replay_moves(detour, moves) == reduced
    )
    details = {"path": detour, "moves": len(moves), "result": reduced}
    return ok, details


# pair scope: hyperplanes


def _front(ctx: SuiteContext, x: int, y: int) -> List[int]:
    system = hyperplane_system(ctx.complex_)
    mask = system.separating(x, y) & system.adjacent[:, x]
    return [int(h) for h in np.flatnonzero(mask)]


def _fronted_geodesic(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    path = fronted_geodesic(ctx.complex_, x, y)
    front = _front(ctx, x, y)
    crossings = crossing_sequence(ctx.complex_, path)
    ok = path.length == int(ctx.dist[x, y]) and set(
        crossings[: len(front)]
    ) == set(front)
    return ok, {"path": path, "front": front, "crossings": crossings}


def _spanning_cube(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    front = _front(ctx, x, y)
    cube, corner = spanning_cube(ctx.complex_, x, front, y)
    system = hyperplane_system(ctx.complex_)
    ok = (
        cube.dim == len(front)
        and x in cube
        and system.separator_ids(x, corner) == front
    )
    return ok, {"cube": list(cube.vertices), "corner": corner}


def _normal_cube_path(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    system = hyperplane_system(ctx.complex_)
    dist = ctx.dist
    cubes = normal_cube_path(ctx.complex_, x, y)
    crossed: set = set()
    current = x
    for cube in cubes:
        diagonal = max(cube.vertices, key=lambda v: dist[current, v])
        step = set(system.separator_ids(current, diagonal))
        if len(step) != cube.dim or step & crossed:
            return False, {"cube": list(cube.vertices), "at": current}
        crossed |= step
        current = diagonal
    ok = current == y and crossed == set(system.separator_ids(x, y))
    return ok, {"cubes": [list(c.vertices) for c in cubes]}


# pair scope: hulls


def _decompositions(ctx: SuiteContext, x: int, y: int):
    for h in _front(ctx, x, y):
        yield decompose_interval(ctx.complex_, x, y, h)


def _decompose_interval(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    checked = 0
    for dec in _decompositions(ctx, inst["x"], inst["y"]):
        checked += 1
        flags = dec.flags()
        flags.pop("forward_inclusion")
        if not all(flags.values()):
            return False, {"hyperplane": dec.hyperplane, "v": dec.v, **flags}
    return True, {"hyperplanes": checked}


def _decompose_forward(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    for dec in _decompositions(ctx, inst["x"], inst["y"]):
        if not dec.forward_inclusion:
            return False, {"hyperplane": dec.hyperplane, "v": dec.v}
    return True, None


def _convexity(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    dist = ctx.dist
    hull = hull_mask(ctx.complex_, (x, y))
    members = np.flatnonzero(hull)
    sample = members[:: max(1, len(members) // 12)]
    for u in sample:
        for v in sample:
            between = dist[u] + dist[v] == dist[u, v]
            if np.any(between & ~hull):
                return False, {"u": int(u), "v": int(v)}
    return True, {"members": len(members)}


def _cube_absorb(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    count = 0
    for cube in ctx.complex_.cubes_by_vertex[y]:
        for b in cube.vertices:
            cube_absorb(ctx.complex_, x, y, b, cube)
            count += 1
    return True, {"instances": count}


def _interval_ball_bound(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for centre in ("y", "x"):
        frame = bound_audit_frame(ctx.complex_, ctx.family, [(x, y)], centre)
        failed = frame[~frame["pass"]]
        if len(failed):
            return False, {"centre": centre, "rows": failed.to_dict("records")}
    return True, None


def _symmetric_difference(
    ctx: SuiteContext, inst: Dict[str, Any]
) -> Outcome:
    system = hyperplane_system(ctx.complex_)
    x, y, a, b = inst["x"], inst["y"], inst["a"], inst["b"]
    lhs = system.separating(x, y) & ~system.separating(a, b)
    rhs = system.separating(a, x) ^ system.separating(b, y)
    bad = np.flatnonzero(lhs & ~rhs)
    return not len(bad), {"hyperplanes": bad.tolist()} if len(bad) else None


# pair scope: cocycle


def _cocycle_axioms(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    v = ctx.third_vertex(x, y)
    n = ctx.complex_.n_vertices
    for point in ctx.exact_points:
        identity = SparseOperator.identity(n, point.one)
        if not cocycle(ctx.complex_, x, x, point).equals(identity):
            return False, {"axiom": "c(x,x) = I", "point": point}
        chained = cocycle(ctx.complex_, v, x, point) @ cocycle(
            ctx.complex_, x, y, point
        )
        if not chained.equals(cocycle(ctx.complex_, v, y, point)):
            return False, {"axiom": "c(v,x)c(x,y) = c(v,y)", "v": v}
    return True, {"v": v}


def _inverse(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    n = ctx.complex_.n_vertices
    for point in ctx.exact_points:
        product = cocycle(ctx.complex_, x, y, point) @ cocycle(
            ctx.complex_, y, x, point
        )
        if not product.equals(SparseOperator.identity(n, point.one)):
            return False, {"point": point}
    return True, None


def _path_independence(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    report = verify_path_independence(
        ctx.complex_,
        inst["x"],
        inst["y"],
        points=ctx.exact_points[:2],
        cap=ctx.config.path_cap,
    )
    details = {
        "paths": report.paths_checked,
        "truncated": report.truncated,
        "detour": report.detour_checked,
    }
    if not report.agree:
        return False, {**details, "paths_compared": report.counterexample}
    return True, details


def _matrix_coefficient(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    d = int(ctx.dist[x, y])
    for point in ctx.exact_points:
        entry = cocycle(ctx.complex_, x, y, point).entry(x, y)
        if entry != point.z**d:
            return False, {"point": point, "entry": str(entry)}
    return True, None


def _finite_propagation(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    d = ctx.dist[x, y]
    far = [e for e in ctx.table(x, y) if ctx.dist[e.a, e.b] > d]
    return not far, {"entries": far[:5]} if far else None


def _support(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    system = hyperplane_system(ctx.complex_)
    separating = system.separating(x, y)
    for e in ctx.table(x, y):
        if np.any(system.separating(e.a, e.b) & ~separating):
            return False, {"entry": e, "law": "separators"}
        if not hull_mask(ctx.complex_, (x, y, e.b))[e.a]:
            return False, {"entry": e, "law": "hull"}
    return True, None


def _monomial_law(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    bound = 2 * ctx.complex_.dim
    methods: Dict[str, int] = {}
    for e in ctx.table(x, y):
        methods[e.method] = methods.get(e.method, 0) + 1
        predicted = predict_coefficient(ctx.complex_, x, y, e.a, e.b)
        m = e.monomial
        if (
            predicted != m
            or m.k != ctx.dist[e.a, e.b]
            or m.ell > bound
        ):
            trace = explain_coefficient(ctx.complex_, x, y, e.a, e.b)
            return False, {"entry": e, "trace": trace}
    return True, {"methods": methods}


def _tree_monomial(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for e in ctx.table(x, y):
        if e.monomial.ell > 2 or e.monomial.k != ctx.dist[e.a, e.b]:
            return False, {"entry": e}
    return True, None


def _sparsity(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    kd = ctx.decomposition(inst["x"], inst["y"])
    for k in range(len(kd.components)):
        worst = max(kd.max_row_count(k), kd.max_column_count(k))
        if worst > kd.count_bound(k):
            return False, {"k": k, "count": worst, "bound": kd.count_bound(k)}
    return True, None


def _tree_sparsity(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    kd = ctx.decomposition(inst["x"], inst["y"])
    for k in range(len(kd.components)):
        worst = max(kd.max_row_count(k), kd.max_column_count(k))
        if worst > 2:
            return False, {"k": k, "count": worst}
    return True, None


def _k_vanishing(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    kd = ctx.decomposition(inst["x"], inst["y"])
    readings = {
        "vanishes_for_k_gt_d": kd.vanishes_beyond_distance(),
        "vanishes_for_k_ge_d": kd.vanishes_from_distance(),
    }
    return readings["vanishes_for_k_gt_d"], readings


def _norm_bound(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for point in ctx.norm_points:
        norm = operator_norm(cocycle(ctx.complex_, x, y, point))
        bound = norm_bound(ctx.complex_, x, y, abs(point.z)).general
        if norm > bound + NORM_SLACK:
            return False, {"z": point.z, "norm": norm, "bound": bound}
    return True, None


def _tree_norm_bound(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for point in ctx.tree_points:
        norm = operator_norm(cocycle(ctx.complex_, x, y, point))
        bound = norm_bound(ctx.complex_, x, y, abs(point.z)).tree
        if norm > bound + NORM_SLACK:
            return False, {"z": point.z, "norm": norm, "bound": bound}
    return True, None


def _unitarity(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for point in ctx.real_points:
        defect = unitarity_defect(cocycle(ctx.complex_, x, y, point))
        if defect > FLOAT_TOL:
            return False, {"z": point.z, "defect": defect}
    return True, None


def _adjoint_symmetry(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for point in ctx.exact_points:
        if adjoint_deviation(ctx.complex_, x, y, point) != 0:
            return False, {"point": point}
    for point in ctx.float_points:
        deviation = adjoint_deviation(ctx.complex_, x, y, point)
        if deviation > FLOAT_TOL:
            return False, {"z": point.z, "deviation": deviation}
    return True, None


def _holomorphy(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    x, y = inst["x"], inst["y"]
    for point in ctx.float_points:
        deviation = holomorphy_deviation(ctx.complex_, x, y, point)
        if deviation > FLOAT_TOL:
            return False, {"z": point.z, "deviation": deviation}
    return True, None


# hyperplane-pair scope


def _intersects_consistency(
    ctx: SuiteContext, inst: Dict[str, Any]
) -> Outcome:
    crossing = intersects(ctx.complex_, inst["h"], inst["k"])
    return True, {"intersect": crossing}


def _parallel_components(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    h, k = inst["h"], inst["k"]
    if intersects(ctx.complex_, h, k):
        return True, {"intersect": True}
    count = parallel_component_count(ctx.complex_, h, k)
    return count <= 3, {"components": count}


# group scope


def _equivariance(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    g = ctx.elements[inst["g"]]
    for x, y in ctx.pairs[:3]:
        for point in ctx.exact_points[:2]:
            report = cocycle_equivariance(ctx.action, g, x, y, point)
            if not report.holds:
                return False, {"g": g, "x": x, "y": y, "point": point}
    return True, None


def _homomorphism(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    index = inst["g"]
    g = ctx.elements[index]
    h = ctx.elements[(7 * index + 3) % len(ctx.elements)]
    for point in ctx.float_points:
        deviation = homomorphism_deviation(ctx.action, g, h, point)
        if deviation > FLOAT_TOL:
            return False, {
                "g": g,
                "h": h,
                "z": point.z,
                "deviation": deviation,
            }
    return True, None


def _base_coefficient(ctx: SuiteContext, inst: Dict[str, Any]) -> Outcome:
    g = ctx.elements[inst["g"]]
    length = ctx.action.length(g)
    for point in ctx.exact_points:
        if base_coefficient(ctx.action, g, point) != point.z**length:
            return False, {"g": g, "point": point}
    for point in ctx.float_points:
        value = base_coefficient(ctx.action, g, point)
        if abs(value - point.z**length) > FLOAT_TOL:
            return False, {"g": g, "z": point.z, "value": value}
    return True, {"length": length}


def _has_group(ctx: SuiteContext) -> bool:
    return bool(ctx.elements)


def _tree_only(ctx: SuiteContext) -> bool:
    return ctx.is_tree


CHECKS: List[Check] = [
    Check(
        "complex.validate",
        "cube complex axioms with the median-graph CAT(0) criterion",
        "complex",
        _validate,
    ),
    Check(
        "hyperplanes.two_sided",
        "every hyperplane cuts the vertex set into exactly two half-spaces",
        "complex",
        _two_sided,
    ),
    Check(
        "hyperplanes.no_self_cross",
        "a hyperplane meets the edges at a vertex at most once",
        "complex",
        _no_self_cross,
    ),
    Check(
        "hyperplanes.intersection_in_square",
        "intersecting hyperplanes adjacent to a vertex cross a square there",
        "complex",
        _intersection_in_square,
    ),
    Check(
        "complex.distance_equals_separators",
        "d(x,y) equals the number of separating hyperplanes",
        "pairs",
        _distance_separators,
    ),
    Check(
        "complex.geodesic_characterisations",
        "on a geodesic, distance additivity and nested separators agree",
        "pairs",
        _geodesic_characterisations,
    ),
    Check(
        "complex.corner_moves_connect",
        "geodesics with equal endpoints differ by corner moves",
        "pairs",
        _corner_moves_connect,
    ),
    Check(
        "complex.reduce_path",
        "corner moves and cancellations reduce any path to a geodesic",
        "pairs",
        _reduce_path,
    ),
    Check(
        "hyperplanes.fronted_geodesic",
        "a geodesic can cross the separators adjacent to x first",
        "pairs",
        _fronted_geodesic,
    ),
    Check(
        "hyperplanes.spanning_cube",
        "separators adjacent to x span a cube at x",
        "pairs",
        _spanning_cube,
    ),
    Check(
        "hyperplanes.normal_cube_path",
        "normal cube paths cross each separator exactly once",
        "pairs",
        _normal_cube_path,
    ),
    Check(
        "hulls.decompose_interval",
        "an interval splits along a hyperplane adjacent to x",
        "pairs",
        _decompose_interval,
    ),
    Check(
        "hulls.decompose_forward_inclusion",
        "the interval lies inside the two parts of its decomposition",
        "pairs",
        _decompose_forward,
    ),
    Check(
        "hulls.convexity",
        "intervals contain every geodesic between their members",
        "pairs",
        _convexity,
    ),
    Check(
        "hulls.cube_absorb",
        "the hull of x, y, b sits in an interval from x to a cube corner",
        "pairs",
        _cube_absorb,
    ),
    Check(
        "hulls.interval_ball_bound",
        "an interval meets a ball of radius k in at most (k+1)^d vertices",
        "pairs",
        _interval_ball_bound,
    ),
    Check(
        "hulls.symmetric_difference",
        "h(x,y) minus h(a,b) lies in h(a,x) symmetric-difference h(b,y)",
        "quads",
        _symmetric_difference,
    ),
    Check(
        "cocycle.axioms",
        "c(x,x) = I and c(v,x)c(x,y) = c(v,y)",
        "pairs",
        _cocycle_axioms,
    ),
    Check(
        "cocycle.inverse",
        "c(x,y)c(y,x) = I",
        "pairs",
        _inverse,
    ),
    Check(
        "cocycle.path_independence",
        "the edge product does not depend on the edge-path",
        "pairs",
        _path_independence,
    ),
    Check(
        "cocycle.matrix_coefficient",
        "<c(x,y) delta_y, delta_x> = z^d(x,y)",
        "pairs",
        _matrix_coefficient,
    ),
    Check(
        "cocycle.finite_propagation",
        "entries vanish when d(a,b) > d(x,y)",
        "pairs",
        _finite_propagation,
    ),
    Check(
        "cocycle.support",
        "nonzero entries have h(a,b) in h(x,y) and a in the hull of x, y, b",
        "pairs",
        _support,
    ),
    Check(
        "cocycle.monomial_law",
        "entries are ±z^d(a,b) w^l with l at most twice the dimension",
        "pairs",
        _monomial_law,
    ),
    Check(
        "cocycle.tree_monomial",
        "on trees entries are ±z^d(a,b) w^l with l at most 2",
        "pairs",
        _tree_monomial,
        _tree_only,
    ),
    Check(
        "cocycle.sparsity",
        "rows and columns of c_k have at most (k+d+1)^d nonzero entries",
        "pairs",
        _sparsity,
    ),
    Check(
        "cocycle.tree_sparsity",
        "on trees rows and columns of c_k have at most two nonzero entries",
        "pairs",
        _tree_sparsity,
        _tree_only,
    ),
    Check(
        "cocycle.k_vanishing",
        "c_k = 0 for k beyond d(x,y)",
        "pairs",
        _k_vanishing,
    ),
    Check(
        "cocycle.norm_bound",
        "||c(x,y)|| <= 2^d sum |z|^k (k+d+1)^d",
        "pairs",
        _norm_bound,
    ),
    Check(
        "cocycle.tree_norm_bound",
        "on trees ||c(x,y)|| <= 4 / (1 - |z|)",
        "pairs",
        _tree_norm_bound,
        _tree_only,
    ),
    Check(
        "cocycle.unitarity",
        "c(x,y) is unitary for real z",
        "pairs",
        _unitarity,
    ),
    Check(
        "cocycle.adjoint_symmetry",
        "c_z(x,y) equals the adjoint of c_conj(z)(y,x)",
        "pairs",
        _adjoint_symmetry,
    ),
    Check(
        "cocycle.holomorphy",
        "numeric entries are the symbolic polynomials at (z, w)",
        "pairs",
        _holomorphy,
    ),
    Check(
        "hyperplanes.intersects_consistency",
        "square crossing and four nonempty quadrants agree",
        "hyperplane_pairs",
        _intersects_consistency,
    ),
    Check(
        "hyperplanes.parallel_components",
        "two parallel hyperplanes leave at most three components",
        "hyperplane_pairs",
        _parallel_components,
    ),
    Check(
        "representation.equivariance",
        "pi(g) c(x,y) pi(g)^-1 = c(gx, gy)",
        "group",
        _equivariance,
        _has_group,
    ),
    Check(
        "representation.homomorphism",
        "pi_z(gh) = pi_z(g) pi_z(h)",
        "group",
        _homomorphism,
        _has_group,
    ),
    Check(
        "representation.base_coefficient",
        "<pi_z(g) delta_x, delta_x> = z^d(x,gx)",
        "group",
        _base_coefficient,
        _has_group,
    ),
]

CHECK_ANCHORS: Dict[str, str] = {c.id: c.anchor for c in CHECKS}
VALIDATION_CHECKS = ("complex.validate",)


def _instances(ctx: SuiteContext, scope: str) -> List[Dict[str, Any]]:
    if scope == "complex":
        return [{}]
    if scope == "pairs":
        return [{"x": x, "y": y} for x, y in ctx.pairs]
    if scope == "quads":
        return [dict(zip("xyab", q)) for q in ctx.quads]
    if scope == "hyperplane_pairs":
        return [{"h": h, "k": k} for h, k in ctx.hyperplane_pairs]
    if scope == "group":
        return [{"g": i} for i in range(len(ctx.elements))]
    raise ValueError(f"unknown scope {scope!r}")


def _run_one(
    ctx: SuiteContext, check: Check, instance: Dict[str, Any]
) -> CheckRecord:
    record = CheckRecord(check.id, check.anchor, instance, STATUS_PASS)
    try:
        passed, info = check.fn(ctx, instance)
        if passed:
            record.details = info
        else:
            record.status = STATUS_FAIL
            record.witness = info
    except CubeComplexError as e:
        logger.info(f"{check.id} {instance}: {e}")
        logger.debug(traceback.format_exc())
        record.status = STATUS_FAIL
        record.witness = {"error": str(e), "witness": e.witness}
    except Exception as e:
        logger.info(f"An error occurred in {check.id} {instance}: {e}")
        logger.debug(traceback.format_exc())
        record.status = STATUS_ERROR
        record.witness = {"error": repr(e)}
    return record


def run_checks(
    ctx: SuiteContext, checks: Sequence[Check], desc: str = "checks"
) -> List[CheckRecord]:
    """Run every instance of every check on a thread pool; records come
    back in task order."""
    tasks = [
        (check, instance)
        for check in checks
        if check.applies(ctx)
        for instance in _instances(ctx, check.scope)
    ]
    records: List[Optional[CheckRecord]] = [None] * len(tasks)
    with concurrent.futures.ThreadPoolExecutor(
        max_workers=max(1, ctx.config.jobs)
    ) as executor:
        futures = {
            executor.submit(_run_one, ctx, check, instance): i
            for i, (check, instance) in enumerate(tasks)
        }
        for future in tqdm(
            concurrent.futures.as_completed(futures),
            total=len(futures),
            desc=desc,
            disable=not ctx.config.progress,
        ):
            records[futures[future]] = future.result()
    return records


def select_checks(ids: Optional[Sequence[str]] = None) -> List[Check]:
    if ids is None:
        return list(CHECKS)
    unknown = set(ids) - set(CHECK_ANCHORS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    return [c for c in CHECKS if c.id in set(ids)]


def run_suite(
    complex_: CubeComplex,
    family: str,
    config: Optional[SuiteConfig] = None,
    action: Optional[GroupAction] = None,
    check_ids: Optional[Sequence[str]] = None,
    command: str = "verify",
) -> Report:
    """Run the verification suite on one complex.

    Validation runs first; the remaining checks only run on a complex that
    passes it.

    Args:
        complex_ (CubeComplex): The complex.
        family (str): Family label used in records.
        config (SuiteConfig, optional): Caps, seed, parallelism.
        action (GroupAction, optional): Automorphisms for the
            representation checks.
        check_ids (Sequence[str], optional): Restrict to these checks.
        command (str, optional): Command echoed in the report.

    Returns:
        Report: The report.
    """
    config = config or SuiteConfig()
    ctx = SuiteContext(complex_, family, config, action)
    checks = select_checks(check_ids)
    first = [c for c in checks if c.id in VALIDATION_CHECKS]
    rest = [c for c in checks if c.id not in VALIDATION_CHECKS]

    report = Report(
        command=command,
        config={"family": family, **config.to_dict()},
        sampling=ctx.sampling,
    )
    report.records.extend(run_checks(ctx, first, desc="validate"))
    if rest and report.passed:
        ctx.prepare_hyperplanes()
        report.records.extend(run_checks(ctx, rest, desc=family))
    elif rest:
        logger.info(f"{family}: validation failed, remaining checks skipped")
    report.partial = bool(
        ctx.sampling["pairs_sampled"]
        or ctx.sampling.get("hyperplane_pairs_sampled", False)
    )
    summary = report.summary()
    logger.info(
        f"{family}: {summary['pass']} passed, {summary['fail']} failed, "
        f"{summary['error']} errors"
    )
    return report


NORM_SCAN_COLUMNS = [
    "family",
    "x",
    "y",
    "z_re",
    "z_im",
    "norm",
    "bound",
    "tree_bound",
    "pass",
]


def norm_scan_frame(
    complex_: CubeComplex,
    family: str,
    points: Sequence[CirclePoint],
    pairs: Sequence[Tuple[int, int]],
    jobs: int = 1,
    progress: bool = True,
) -> pd.DataFrame:
    """Measured norms against the bounds, one row per pair and point."""

    def scan(pair: Tuple[int, int]) -> List[Dict[str, Any]]:
        x, y = pair
        rows = []
        for point in points:
            norm = operator_norm(cocycle(complex_, x, y, point))
            bounds = norm_bound(complex_, x, y, abs(point.z))
            rows.append(
                {
                    "family": family,
                    "x": x,
                    "y": y,
                    "z_re": point.z.real,
                    "z_im": point.z.imag,
                    "norm": norm,
                    "bound": bounds.general,
                    "tree_bound": bounds.tree,
                    "pass": norm <= bounds.best + NORM_SLACK,
                }
            )
        return rows

    with concurrent.futures.ThreadPoolExecutor(
        max_workers=max(1, jobs)
    ) as executor:
        chunks = list(
            tqdm(
                executor.map(scan, pairs),
                total=len(pairs),
                desc="norm-scan",
                disable=not progress,
            )
        )
    rows = [row for chunk in chunks for row in chunk]
    return pd.DataFrame(rows, columns=NORM_SCAN_COLUMNS)


def coefficient_report(
    complex_: CubeComplex, x: int, y: int
) -> Dict[str, Any]:
    """Symbolic entries of ``c(x,y)`` next to their combinatorial
    prediction."""
    entries = []
    agree = True
    for e in coefficient_table(complex_, x, y):
        predicted = predict_coefficient(complex_, x, y, e.a, e.b)
        match = predicted == e.monomial
        agree = agree and match
        entries.append(
            {
                **e.to_dict(),
                "predicted": (
                    None if predicted is None else predicted.to_dict()
                ),
                "agree": match,
            }
        )
    return {
        "x": x,
        "y": y,
        "distance": int(complex_.distances[x, y]),
        "dim": complex_.dim,
        "agree": agree,
        "entries": entries,
    }


def validation_report(
    complex_: CubeComplex, family: str, seed: int = 0
) -> Report:
    config = SuiteConfig(seed=seed, jobs=1, progress=False)
    return run_suite(
        complex_,
        family,
        config,
        check_ids=("complex.validate", "hyperplanes.two_sided"),
        command="validate",
    )


def failures(report: Report) -> List[CheckRecord]:
    return [r for r in report.records if r.status != STATUS_PASS]


__all__ = [
    "CHECKS",
    "CHECK_ANCHORS",
    "Check",
    "CheckRecord",
    "Report",
    "SuiteConfig",
    "SuiteContext",
    "coefficient_report",
    "norm_scan_frame",
    "run_checks",
    "run_suite",
    "sample_pairs",
    "validation_report",
]
