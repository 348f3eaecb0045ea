"""Exact scalars for the cocycle: polynomials in ``z`` and ``w`` and points
on the complex circle ``z^2 + w^2 = 1``."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

import numpy as np

from cubecocycle.exceptions import PreconditionError

Exponents = Tuple[int, int]
Number = Union[int, Fraction, complex]

FLOAT_CIRCLE_TOL = 1e-14


class ZWPolynomial:
    """Integer polynomial in two independent variables ``z`` and ``w``.

    ``terms`` maps ``(k, ell)`` to the coefficient of ``z^k w^ell``; zero
    coefficients are never stored. The circle relation is only applied by
    :meth:`reduce_circle`.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Exponents, int]] = None):
        self.terms: Dict[Exponents, int] = {
            exps: int(c) for exps, c in (terms or {}).items() if c
        }

    @classmethod
    def zero(cls) -> "ZWPolynomial":
        return cls()

    @classmethod
    def one(cls) -> "ZWPolynomial":
        return cls({(0, 0): 1})

    @classmethod
    def z(cls) -> "ZWPolynomial":
        return cls({(1, 0): 1})

    @classmethod
    def w(cls) -> "ZWPolynomial":
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, sign: int, k: int, ell: int) -> "ZWPolynomial":
        return cls({(k, ell): sign})

    @staticmethod
    def _coerce(other: object) -> Optional["ZWPolynomial"]:
        if isinstance(other, ZWPolynomial):
            return other
        if isinstance(other, int):
            return ZWPolynomial({(0, 0): other})
        return None

    def __add__(self, other: object) -> "ZWPolynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            terms[exps] = terms.get(exps, 0) + c
        return ZWPolynomial(terms)

    __radd__ = __add__

    def __neg__(self) -> "ZWPolynomial":
        return ZWPolynomial({exps: -c for exps, c in self.terms.items()})

    def __sub__(self, other: object) -> "ZWPolynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "ZWPolynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: object) -> "ZWPolynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: Dict[Exponents, int] = {}
        for (k1, l1), c1 in self.terms.items():
            for (k2, l2), c2 in other.terms.items():
                key = (k1 + k2, l1 + l2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return ZWPolynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "ZWPolynomial":
        result = ZWPolynomial.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"ZWPolynomial({str(self)!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (k, ell), c in sorted(self.terms.items()):
            factors = [
                f"{name}^{e}" if e > 1 else name
                for name, e in (("z", k), ("w", ell))
                if e
            ]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def conjugate(self) -> "ZWPolynomial":
        return self

    def evaluate(self, z: Number, w: Number) -> Number:
        total: Number = 0
        for (k, ell), c in self.terms.items():
            total += c * z**k * w**ell
        return total

    def as_monomial(self) -> Optional["SignedMonomial"]:
        """The single signed monomial this polynomial equals, if any."""
        if len(self.terms) != 1:
            return None
        (k, ell), c = next(iter(self.terms.items()))
        if c not in (1, -1):
            return None
        return SignedMonomial(c, k, ell)

    def z_components(self) -> Dict[int, "ZWPolynomial"]:
        """Group terms by ``z``-exponent; values are polynomials in ``w``."""
        parts: Dict[int, Dict[Exponents, int]] = {}
        for (k, ell), c in self.terms.items():
            parts.setdefault(k, {})[(0, ell)] = c
        return {k: ZWPolynomial(t) for k, t in sorted(parts.items())}

    def reduce_circle(self) -> "ZWPolynomial":
        """Rewrite ``w^2`` as ``1 - z^2`` until every ``w``-exponent is at
        most one."""
        result = ZWPolynomial()
        for (k, ell), c in self.terms.items():
            half, rest = divmod(ell, 2)
            # (1 - z^2)^half
            factor = ZWPolynomial.one() - ZWPolynomial({(2, 0): 1})
            result = result + (
                ZWPolynomial({(k, rest): c}) * factor**half
            )
        return result


@dataclass(frozen=True, order=True)
class SignedMonomial:
    sign: int
    k: int
    ell: int

    def to_polynomial(self) -> ZWPolynomial:
        return ZWPolynomial.monomial(self.sign, self.k, self.ell)

    def evaluate(self, z: Number, w: Number) -> Number:
        return self.sign * z**self.k * w**self.ell

    def to_dict(self) -> Dict[str, int]:
        return {"sign": self.sign, "k": self.k, "ell": self.ell}

    def __str__(self) -> str:
        return str(self.to_polynomial())


@dataclass(frozen=True)
class CirclePoint:
    """A solution of ``z^2 + w^2 = 1``.

    Exact points hold :class:`Fraction` values, float points hold complex
    doubles with ``w`` on the principal branch of ``sqrt(1 - z^2)``.
    """

    z: Union[Fraction, complex]
    w: Union[Fraction, complex]
    exact: bool
    branch: str = "principal"

    @classmethod
    def rational(cls, t: Union[Fraction, int, str]) -> "CirclePoint":
        t = Fraction(t)
        if not -1 < t < 1:
            raise PreconditionError(
                f"parameter t = {t} must lie in (-1, 1)", witness=t
            )
        denominator = 1 + t * t
        return cls(2 * t / denominator, (1 - t * t) / denominator, True)

    @classmethod
    def from_z(cls, z: complex) -> "CirclePoint":
        z = complex(z)
        w = complex(np.sqrt(np.complex128(1 - z * z)))
        point = cls(z, w, False)
        if abs(z * z + w * w - 1) > FLOAT_CIRCLE_TOL:
            raise PreconditionError(
                f"z = {z} gives a point off the circle", witness=z
            )
        return point

    @property
    def one(self) -> Union[Fraction, complex]:
        return Fraction(1) if self.exact else complex(1)

    @property
    def is_real(self) -> bool:
        return self.exact or self.z.imag == 0

    def conjugate(self) -> "CirclePoint":
        if self.exact:
            return self
        return CirclePoint(
            self.z.conjugate(), self.w.conjugate(), False, self.branch
        )

    def evaluate(self, value: Union[ZWPolynomial, SignedMonomial]) -> Number:
        return value.evaluate(self.z, self.w)

    def to_dict(self) -> Dict[str, object]:
        if self.exact:
            return {"z": str(self.z), "w": str(self.w), "exact": True}
        return {
            "z_re": self.z.real,
            "z_im": self.z.imag,
            "w_re": self.w.real,
            "w_im": self.w.imag,
            "exact": False,
        }


class SymbolicPoint:
    """Stands in for a :class:`CirclePoint` with ``z``, ``w`` free."""

    exact = True
    z = ZWPolynomial.z()
    w = ZWPolynomial.w()

    @property
    def one(self) -> ZWPolynomial:
        return ZWPolynomial.one()


SYMBOLIC = SymbolicPoint()


def rational_parameters() -> Iterator[Fraction]:
    """``1/2, -1/3, 1/4, -1/5, ...``: distinct, nonzero, inside (-1, 1)."""
    j = 2
    while True:
        yield Fraction(1 if j % 2 == 0 else -1, j)
        j += 1


def rational_points(count: int) -> List[CirclePoint]:
    params = rational_parameters()
    return [CirclePoint.rational(next(params)) for _ in range(count)]


def z_grid(
    radial: int, angular: int, r_max: float, include_zero: bool = True
) -> List[CirclePoint]:
    """Polar grid of float points: radii ``r_max*i/radial`` for
    ``i = 1..radial`` and angles ``2*pi*j/angular``."""
    points = [CirclePoint.from_z(0)] if include_zero else []
    for i in range(1, radial + 1):
        radius = r_max * i / radial
        for j in range(angular):
            angle = 2 * np.pi * j / angular
            points.append(CirclePoint.from_z(radius * np.exp(1j * angle)))
    return points
