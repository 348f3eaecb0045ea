from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import identity as sparse_identity
from scipy.sparse.linalg import norm as sparse_norm
from scipy.sparse.linalg import svds

from cubecocycle.exceptions import ConvergenceError, PreconditionError
from cubecocycle.utils.log import get_logger
from cubecocycle.zw import ZWPolynomial

logger = get_logger(__name__)

NORM_TOL = 1e-10
NORM_MAX_ITER = 100_000
NORM_CERTIFY_TOL = 1e-6
DENSE_REFERENCE_MAX = 500

Scalar = Union[Fraction, complex, ZWPolynomial]
Column = Dict[int, Scalar]


@dataclass(eq=False)
class SparseOperator:
    """Column-sparse operator on functions on ``n`` vertices.

    ``columns[b]`` maps row ``a`` to the entry ``<T delta_b, delta_a>``.
    Columns not listed act as the identity when ``identity_off_support``
    is set and as zero otherwise.
    """

    n: int
    columns: Dict[int, Column] = field(default_factory=dict)
    one: Scalar = Fraction(1)
    identity_off_support: bool = True

    @classmethod
    def identity(cls, n: int, one: Scalar = Fraction(1)) -> "SparseOperator":
        return cls(n, {}, one)

    @classmethod
    def permutation(
        cls, mapping: Sequence[int], one: Scalar = Fraction(1)
    ) -> "SparseOperator":
        """The operator ``delta_v -> delta_{mapping[v]}``."""
        columns = {
            v: {int(image): one}
            for v, image in enumerate(mapping)
            if image != v
        }
        return cls(len(mapping), columns, one)

    @property
    def zero(self) -> Scalar:
        return self.one - self.one

    def column(self, b: int) -> Column:
        if b in self.columns:
            return self.columns[b]
        if self.identity_off_support:
            return {b: self.one}
        return {}

    def entry(self, a: int, b: int) -> Scalar:
        return self.column(b).get(a, self.zero)

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.columns))

    def nonzero_entries(self) -> Iterator[Tuple[int, int, Scalar]]:
        """Explicitly stored nonzero entries as ``(row, column, value)``."""
        for b in sorted(self.columns):
            for a, value in sorted(self.columns[b].items()):
                if value != 0:
                    yield a, b, value

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        if self.n != other.n:
            raise PreconditionError(
                f"operator sizes differ: {self.n} and {other.n}"
            )
        zero = self.zero
        columns: Dict[int, Column] = {}
        for b in set(self.columns) | set(other.columns):
            result: Column = {}
            for c, coefficient in other.column(b).items():
                for a, value in self.column(c).items():
                    result[a] = result.get(a, zero) + value * coefficient
            columns[b] = {a: v for a, v in result.items() if v != 0}
        return SparseOperator(
            self.n,
            columns,
            self.one,
            self.identity_off_support and other.identity_off_support,
        )

    def map(
        self, fn: Callable[[Scalar], Scalar], one: Optional[Scalar] = None
    ) -> "SparseOperator":
        """Apply ``fn`` entrywise, e.g. to evaluate polynomial entries."""
        new_one = fn(self.one) if one is None else one
        return SparseOperator(
            self.n,
            {
                b: {a: fn(v) for a, v in col.items()}
                for b, col in self.columns.items()
            },
            new_one,
            self.identity_off_support,
        )

    def transpose(self) -> "SparseOperator":
        columns: Dict[int, Column] = {b: {} for b in self.columns}
        for b, col in self.columns.items():
            for a, value in col.items():
                columns.setdefault(a, {})
                if self.identity_off_support and a not in self.columns:
                    columns[a].setdefault(a, self.one)
                columns[a][b] = value
        return SparseOperator(
            self.n, columns, self.one, self.identity_off_support
        )

    def adjoint(self) -> "SparseOperator":
        return self.transpose().map(_conjugate, one=self.one)

    def row_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for a, _, _ in self.nonzero_entries():
            counts[a] = counts.get(a, 0) + 1
        return counts

    def column_counts(self) -> Dict[int, int]:
        return {
            b: sum(1 for v in col.values() if v != 0)
            for b, col in self.columns.items()
        }

    def is_zero(self) -> bool:
        return not self.identity_off_support and not any(
            True for _ in self.nonzero_entries()
        )

    def max_deviation(self, other: "SparseOperator") -> float:
        """Largest entrywise ``|self - other|``; exact scalars give 0.0 only
        on exact equality."""
        worst = 0.0
        for b in set(self.columns) | set(other.columns):
            mine, theirs = self.column(b), other.column(b)
            for a in set(mine) | set(theirs):
                diff = mine.get(a, self.zero) - theirs.get(a, other.zero)
                if isinstance(diff, ZWPolynomial):
                    worst = max(worst, 0.0 if not diff else float("inf"))
                else:
                    worst = max(worst, float(abs(diff)))
        if self.identity_off_support != other.identity_off_support:
            untouched = set(range(self.n)) - set(self.columns)
            if untouched - set(other.columns):
                worst = max(worst, 1.0)
        return worst

    def equals(self, other: "SparseOperator", tol: float = 0.0) -> bool:
        return self.max_deviation(other) <= tol

    def to_scipy(self, dtype: type = complex) -> csr_matrix:
        rows, cols, data = [], [], []
        for b in range(self.n):
            for a, value in self.column(b).items():
                rows.append(a)
                cols.append(b)
                data.append(_to_number(value))
        return csr_matrix(
            (np.array(data, dtype=dtype), (rows, cols)),
            shape=(self.n, self.n),
        )

    def to_dense(self, dtype: type = complex) -> np.ndarray:
        return self.to_scipy(dtype).toarray()


def _conjugate(value: Scalar) -> Scalar:
    if isinstance(value, complex):
        return value.conjugate()
    return value


def _to_number(value: Scalar) -> complex:
    if isinstance(value, ZWPolynomial):
        raise PreconditionError(
            "symbolic operator must be evaluated before numerics"
        )
    return complex(value)


@dataclass(frozen=True)
class NormEstimate:
    norm: float
    residual: float
    iterations: int


def reference_norm(matrix: csr_matrix) -> float:
    """Largest singular value from a direct solver: dense SVD up to
    ``DENSE_REFERENCE_MAX`` columns, ARPACK ``svds`` beyond."""
    if min(matrix.shape) <= DENSE_REFERENCE_MAX:
        return float(np.linalg.norm(matrix.toarray(), 2))
    sigma = svds(matrix, k=1, return_singular_vectors=False)
    return float(np.max(sigma))


def certify_norm(
    matrix: csr_matrix,
    estimate: NormEstimate,
    tol: float = NORM_CERTIFY_TOL,
) -> NormEstimate:
    """Checks a power iteration estimate against ``reference_norm``.

    Raises:
        ConvergenceError: The two disagree by more than ``tol``
            relative to the reference.
    """
    reference = reference_norm(matrix)
    if abs(estimate.norm - reference) > tol * max(reference, 1.0):
        raise ConvergenceError(
            f"power iteration norm {estimate.norm:.12g} disagrees with "
            f"reference norm {reference:.12g}",
            estimate.residual,
        )
    return estimate


def power_iteration(
    matrix: csr_matrix,
    tol: float = NORM_TOL,
    max_iter: int = NORM_MAX_ITER,
    seed: int = 0,
    certify: bool = True,
) -> NormEstimate:
    """Largest singular value of ``matrix`` by power iteration on
    ``A^H A``.

    Starts from a seeded random complex vector and stops when the
    Rayleigh quotient changes by less than ``tol`` relatively. The
    result is then certified with ``certify_norm``.

    Args:
        matrix (csr_matrix): The operator.
        tol (float, optional): Relative tolerance. Defaults to 1e-10.
        max_iter (int, optional): Iteration cap. Defaults to 100000.
        seed (int, optional): Seed of the start vector.
        certify (bool, optional): Compare with ``reference_norm``.

    Raises:
        ConvergenceError: The cap was reached or certification failed.

    Returns:
        NormEstimate: Norm, relative residual, iteration count.
    """
    n = matrix.shape[1]
    if n == 0 or matrix.nnz == 0:
        return NormEstimate(0.0, 0.0, 0)
    adjoint = matrix.conj().T.tocsr()

    def gram(v: np.ndarray) -> np.ndarray:
        return adjoint @ (matrix @ v)

    rng = np.random.default_rng(seed)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    u = gram(v)
    eigenvalue = float(np.real(np.vdot(v, u)))
    for iteration in range(1, max_iter + 1):
        u_norm = np.linalg.norm(u)
        if u_norm == 0:
            return NormEstimate(0.0, 0.0, iteration)
        v = u / u_norm
        u = gram(v)
        updated = float(np.real(np.vdot(v, u)))
        change = abs(updated - eigenvalue)
        eigenvalue = updated
        if change <= tol * max(eigenvalue, 1e-300):
            residual = float(
                np.linalg.norm(u - eigenvalue * v) / max(eigenvalue, 1e-300)
            )
            estimate = NormEstimate(
                float(np.sqrt(eigenvalue)), residual, iteration
            )
            return certify_norm(matrix, estimate) if certify else estimate
    residual = float(np.linalg.norm(u - eigenvalue * v))
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps", residual
    )


def operator_norm(
    op: Union[SparseOperator, csr_matrix],
    tol: float = NORM_TOL,
    max_iter: int = NORM_MAX_ITER,
    seed: int = 0,
) -> float:
    matrix = op.to_scipy() if isinstance(op, SparseOperator) else op
    estimate = power_iteration(matrix, tol=tol, max_iter=max_iter, seed=seed)
    logger.debug(
        f"norm {estimate.norm:.12g} after {estimate.iterations} steps, "
        f"residual {estimate.residual:.2e}"
    )
    return estimate.norm


def unitarity_defect(op: SparseOperator) -> float:
    """Frobenius norm of ``T^* T - I``, an upper bound for its spectral
    norm."""
    matrix = op.to_scipy()
    defect = matrix.conj().T @ matrix - sparse_identity(
        op.n, dtype=complex, format="csr"
    )
    return float(sparse_norm(defect))
