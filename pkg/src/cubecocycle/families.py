import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Optional, Tuple

import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher

from cubecocycle.complex_core import (
    CubeComplex,
    cube_faces,
    require_valid,
)
from cubecocycle.exceptions import FamilyError
from cubecocycle.representation import (
    AUTOMORPHISM_CAP,
    GroupAction,
    Permutation,
    check_automorphism,
)
from cubecocycle.utils.lcg import lcg_stream
from cubecocycle.utils.log import get_logger

logger = get_logger(__name__)

MAX_VERTICES = 2000
MAX_DIMENSION = 6
EXHAUSTIVE_TREE_AUTOMORPHISMS = 12

KINDS = (
    "segment",
    "square",
    "hypercube",
    "grid",
    "tree",
    "random_tree",
    "product",
    "json",
)
_SPEC_PATTERN = re.compile(r"^\s*(\w+)\s*(?::(.*)|\((.*)\))?\s*$")


@dataclass(frozen=True)
class FamilySpec:
    """A generated family, e.g. ``grid(3x4)`` or
    ``product(tree(3,2)*segment(4))``."""

    kind: str
    params: Tuple[Any, ...] = ()
    factors: Tuple["FamilySpec", ...] = ()

    def __str__(self) -> str:
        if self.kind == "product":
            return f"product({'*'.join(str(f) for f in self.factors)})"
        if self.kind == "square":
            return "square"
        if self.kind == "grid":
            return f"grid({'x'.join(str(p) for p in self.params)})"
        return f"{self.kind}({','.join(str(p) for p in self.params)})"


def _split_factors(text: str) -> List[str]:
    parts, depth, current = [], 0, []
    for char in text:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == "*" and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(char)
    parts.append("".join(current))
    return [p.strip() for p in parts]


def _ints(text: str, separators: str = ",") -> Tuple[int, ...]:
    try:
        return tuple(
            int(p) for p in re.split(f"[{separators}]", text) if p.strip()
        )
    except ValueError as e:
        raise FamilyError(f"bad family parameters {text!r}") from e


def parse_family(text: str) -> FamilySpec:
    """Parse ``kind:args`` or ``kind(args)`` family strings.

    Raises:
        FamilyError: Unknown kind or malformed parameters.
    """
    match = _SPEC_PATTERN.match(text)
    if match is None:
        raise FamilyError(f"cannot parse family {text!r}")
    kind = match.group(1).lower()
    args = match.group(2) if match.group(2) is not None else match.group(3)
    args = (args or "").strip()
    if kind not in KINDS:
        raise FamilyError(f"unknown family kind {kind!r} in {text!r}")

    if kind == "square":
        return FamilySpec("square")
    if kind == "json":
        if not args:
            raise FamilyError("json family needs a path")
        return FamilySpec("json", (args,))
    if kind == "product":
        factors = tuple(parse_family(part) for part in _split_factors(args))
        if len(factors) < 2:
            raise FamilyError(f"product needs two factors, got {text!r}")
        return FamilySpec("product", factors=factors)
    if kind == "grid":
        params = _ints(args, "x×,")
    else:
        params = _ints(args)
    expected = {
        "segment": 1,
        "hypercube": 1,
        "tree": 2,
        "random_tree": 2,
    }.get(kind)
    if expected is not None and len(params) != expected:
        raise FamilyError(
            f"{kind} takes {expected} parameter(s), got {text!r}"
        )
    if kind == "grid" and not params:
        raise FamilyError(f"grid needs side lengths, got {text!r}")
    if (
        any(p < 0 for p in params)
        or (kind == "tree" and params[0] < 1)
        or (kind == "random_tree" and params[0] < 1)
    ):
        raise FamilyError(f"parameters out of range in {text!r}")
    return FamilySpec(kind, params)


def expected_size(spec: FamilySpec) -> Tuple[int, int]:
    """Vertex count and dimension of the family, computed without
    building it."""
    if spec.kind == "segment":
        n = spec.params[0]
        return n + 1, 1 if n else 0
    if spec.kind == "square":
        return 4, 2
    if spec.kind == "hypercube":
        return 2 ** spec.params[0], spec.params[0]
    if spec.kind == "grid":
        sizes = [
            expected_size(FamilySpec("segment", (p,))) for p in spec.params
        ]
        return int(np.prod([s[0] for s in sizes])), sum(s[1] for s in sizes)
    if spec.kind == "tree":
        arity, depth = spec.params
        n = sum(arity**j for j in range(depth + 1))
        return n, 1 if n > 1 else 0
    if spec.kind == "random_tree":
        n = spec.params[0]
        return n, 1 if n > 1 else 0
    if spec.kind == "product":
        sizes = [expected_size(f) for f in spec.factors]
        return int(np.prod([s[0] for s in sizes])), sum(s[1] for s in sizes)
    return 0, 0


def _segment(n: int) -> CubeComplex:
    cubes = [[v] for v in range(n + 1)] + [[v, v + 1] for v in range(n)]
    return CubeComplex.from_cubes(n + 1, cubes, name=f"segment({n})")


def _hypercube(d: int) -> CubeComplex:
    coords = {v: v for v in range(2**d)}
    cubes = [sorted(face) for face in cube_faces(coords, d)]
    return CubeComplex.from_cubes(2**d, cubes, name=f"hypercube({d})")


def _tree_from_parents(parents: List[int], name: str) -> CubeComplex:
    n = len(parents) + 1
    cubes = [[v] for v in range(n)] + [
        [p, child] for child, p in enumerate(parents, start=1)
    ]
    return CubeComplex.from_cubes(n, cubes, name=name)


def _regular_tree(arity: int, depth: int) -> CubeComplex:
    n, _ = expected_size(FamilySpec("tree", (arity, depth)))
    parents = [(child - 1) // arity for child in range(1, n)]
    return _tree_from_parents(parents, f"tree({arity},{depth})")


def _random_tree(n: int, seed: int) -> CubeComplex:
    stream = lcg_stream(seed)
    parents = [next(stream) % child for child in range(1, n)]
    return _tree_from_parents(parents, f"random_tree({n},{seed})")


def product(first: CubeComplex, second: CubeComplex) -> CubeComplex:
    """Product complex; vertex ``(i, j)`` gets id ``i * n2 + j``."""
    n2 = second.n_vertices
    cubes = [
        [i * n2 + j for i in c1.vertices for j in c2.vertices]
        for c1 in first.cubes
        for c2 in second.cubes
    ]
    return CubeComplex.from_cubes(
        first.n_vertices * n2,
        cubes,
        complete_faces=False,
        name=f"{first.name}*{second.name}",
    )


def _build(spec: FamilySpec) -> CubeComplex:
    if spec.kind == "segment":
        return _segment(spec.params[0])
    if spec.kind == "square":
        return _hypercube(2)
    if spec.kind == "hypercube":
        return _hypercube(spec.params[0])
    if spec.kind == "grid":
        result = _segment(spec.params[0])
        for side in spec.params[1:]:
            result = product(result, _segment(side))
        return result
    if spec.kind == "tree":
        return _regular_tree(*spec.params)
    if spec.kind == "random_tree":
        return _random_tree(*spec.params)
    if spec.kind == "product":
        result = _build(spec.factors[0])
        for factor in spec.factors[1:]:
            result = product(result, _build(factor))
        return result
    if spec.kind == "json":
        return CubeComplex.from_json(spec.params[0])
    raise FamilyError(f"unknown family kind {spec.kind!r}")


def generate(
    spec: FamilySpec,
    max_vertices: int = MAX_VERTICES,
    max_dimension: int = MAX_DIMENSION,
    validate: bool = True,
) -> CubeComplex:
    """Build and validate the complex of a family.

    Args:
        spec (FamilySpec): The family.
        max_vertices (int, optional): Vertex budget.
        max_dimension (int, optional): Dimension budget.
        validate (bool, optional): Run the CAT(0) check.

    Raises:
        FamilyError: The budget is exceeded.
        InvalidComplexError: A ``json`` input fails validation.

    Returns:
        CubeComplex: The complex, named after ``spec``.
    """
    n, dim = expected_size(spec)
    if n > max_vertices or dim > max_dimension:
        raise FamilyError(
            f"{spec} has {n} vertices and dimension {dim}, over the budget "
            f"of {max_vertices} vertices and dimension {max_dimension}",
            witness={"n_vertices": n, "dim": dim},
        )
    built = _build(spec)
    if built.n_vertices > max_vertices or built.dim > max_dimension:
        raise FamilyError(
            f"{spec} exceeds the budget", witness=built.n_vertices
        )
    complex_ = CubeComplex(
        n_vertices=built.n_vertices,
        cubes=built.cubes,
        name=str(spec) if spec.kind != "json" else built.name,
        completed_faces=built.completed_faces,
    )
    if validate:
        require_valid(complex_)
    logger.info(f"Generated {complex_!r}")
    return complex_


def _grid_automorphisms(sides: Tuple[int, ...]) -> List[Permutation]:
    shape = tuple(side + 1 for side in sides)
    coords = np.indices(shape).reshape(len(shape), -1)
    generators = []
    for axis, length in enumerate(shape):
        if length < 2:
            continue
        moved = coords.copy()
        moved[axis] = length - 1 - moved[axis]
        generators.append(tuple(np.ravel_multi_index(moved, shape).tolist()))
    for axis in range(len(shape) - 1):
        for other in range(axis + 1, len(shape)):
            if shape[axis] == shape[other]:
                moved = coords.copy()
                moved[[axis, other]] = moved[[other, axis]]
                generators.append(
                    tuple(np.ravel_multi_index(moved, shape).tolist())
                )
    return generators


def _hypercube_automorphisms(d: int) -> List[Permutation]:
    n = 2**d
    generators = [tuple(v ^ (1 << i) for v in range(n)) for i in range(d)]
    for i in range(d - 1):
        swap = []
        for v in range(n):
            low, high = (v >> i) & 1, (v >> (i + 1)) & 1
            cleared = v & ~((1 << i) | (1 << (i + 1)))
            swap.append(cleared | (high << i) | (low << (i + 1)))
        generators.append(tuple(swap))
    return generators


def _subtree(children: List[List[int]], root: int) -> List[int]:
    order, stack = [], [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(children[v]))
    return order


def _regular_tree_automorphisms(complex_: CubeComplex) -> List[Permutation]:
    """Swaps of consecutive sibling subtrees; they generate the full
    automorphism group of a rooted regular tree."""
    n = complex_.n_vertices
    children: List[List[int]] = [[] for _ in range(n)]
    for parent, child in complex_.edges:
        children[parent].append(child)
    generators = []
    for v in range(n):
        kids = sorted(children[v])
        for left, right in zip(kids, kids[1:]):
            g = list(range(n))
            pairs = zip(_subtree(children, left), _subtree(children, right))
            for a, b in pairs:
                g[a], g[b] = b, a
            generators.append(tuple(g))
    return generators


def _graph_automorphisms(
    complex_: CubeComplex, cap: int
) -> List[Permutation]:
    matcher = GraphMatcher(complex_.graph, complex_.graph)
    found = []
    for mapping in itertools.islice(matcher.isomorphisms_iter(), cap):
        found.append(tuple(mapping[v] for v in range(complex_.n_vertices)))
    return found


def _lift(
    generators: List[Permutation], n1: int, n2: int, left: bool
) -> List[Permutation]:
    lifted = []
    for g in generators:
        if left:
            lifted.append(
                tuple(g[i] * n2 + j for i in range(n1) for j in range(n2))
            )
        else:
            lifted.append(
                tuple(i * n2 + g[j] for i in range(n1) for j in range(n2))
            )
    return lifted


def _automorphisms(
    spec: FamilySpec, complex_: CubeComplex, cap: int
) -> List[Permutation]:
    if spec.kind == "segment":
        n = spec.params[0]
        return [tuple(n - v for v in range(n + 1))] if n else []
    if spec.kind == "square":
        return _hypercube_automorphisms(2)
    if spec.kind == "hypercube":
        return _hypercube_automorphisms(spec.params[0])
    if spec.kind == "grid":
        return _grid_automorphisms(spec.params)
    if spec.kind == "tree":
        return _regular_tree_automorphisms(complex_)
    if spec.kind == "random_tree":
        if complex_.n_vertices <= EXHAUSTIVE_TREE_AUTOMORPHISMS:
            return _graph_automorphisms(complex_, cap)
        logger.info(
            f"{spec}: more than {EXHAUSTIVE_TREE_AUTOMORPHISMS} vertices, "
            f"no automorphisms searched"
        )
        return []
    if spec.kind == "product":
        factors = list(spec.factors)
        left_spec = factors[0]
        left = _build(left_spec)
        generators = _automorphisms(left_spec, left, cap)
        for right_spec in factors[1:]:
            right = _build(right_spec)
            n1, n2 = left.n_vertices, right.n_vertices
            combined = _lift(generators, n1, n2, left=True) + _lift(
                _automorphisms(right_spec, right, cap), n1, n2, left=False
            )
            if str(left_spec) == str(right_spec):
                combined.append(
                    tuple(j * n2 + i for i in range(n1) for j in range(n2))
                )
            generators = combined
            left = product(left, right)
            left_spec = FamilySpec("product", factors=(left_spec, right_spec))
        return generators
    logger.info(f"{spec}: automorphisms not supported")
    return []


def automorphisms(
    spec: FamilySpec,
    complex_: Optional[CubeComplex] = None,
    cap: int = AUTOMORPHISM_CAP,
) -> List[Permutation]:
    """Automorphism generators of a family, each checked to permute the
    cubes. Unsupported families give an empty list."""
    if complex_ is None:
        complex_ = generate(spec)
    generators = _automorphisms(spec, complex_, cap)
    identity = tuple(range(complex_.n_vertices))
    checked = [
        check_automorphism(complex_, g) for g in generators if g != identity
    ]
    return list(dict.fromkeys(checked))


def group_action(
    spec: FamilySpec,
    complex_: Optional[CubeComplex] = None,
    base_point: int = 0,
) -> GroupAction:
    if complex_ is None:
        complex_ = generate(spec)
    return GroupAction(complex_, automorphisms(spec, complex_), base_point)


def load_family(text: str, **kwargs: Any) -> Tuple[FamilySpec, CubeComplex]:
    """Parse a family string (or a path to a JSON complex) and generate."""
    if text.endswith(".json") and Path(text).exists():
        spec = FamilySpec("json", (text,))
    else:
        spec = parse_family(text)
    return spec, generate(spec, **kwargs)
