"""Exact coefficient ring Q[pi^2, pi^-2] + sqrt(2) Q[pi^2, pi^-2].

Every exact result in wpvol (curve coefficients, correlators, volumes) is an
``ExactScalar``.  Rationals are plain :class:`fractions.Fraction` values, which
are always stored in lowest terms with a positive denominator.

An ``ExactScalar`` is a sparse map ``(pi_exp, has_sqrt2) -> Fraction`` with no
zero entries, so structural equality is equality in the ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import mpmath

from wpvol.errors import InvalidArgumentError, NotInvertibleError

Rational = Fraction

# (pi exponent, carries sqrt(2))
Basis = tuple[int, bool]

ScalarLike = Union["ExactScalar", Fraction, int]

_SUPERSCRIPTS = str.maketrans("-0123456789", "⁻⁰¹²³⁴⁵⁶⁷⁸⁹")


def _canonical(items: Iterable[tuple[Basis, Fraction]]) -> tuple[tuple[Basis, Fraction], ...]:
    acc: dict[Basis, Fraction] = {}
    for basis, coeff in items:
        if basis[0] % 2:
            raise InvalidArgumentError(f"odd pi exponent {basis[0]} is outside the ring")
        acc[basis] = acc.get(basis, Fraction(0)) + coeff
    return tuple(sorted((b, c) for b, c in acc.items() if c != 0))


@dataclass(frozen=True)
class ExactScalar:
    """Element of Q[pi^2, pi^-2] (+) sqrt(2) Q[pi^2, pi^-2] in canonical form."""

    terms: tuple[tuple[Basis, Fraction], ...] = ()

    # --- construction ---

    @classmethod
    def of(cls, items: Iterable[tuple[Basis, Fraction]]) -> ExactScalar:
        return cls(_canonical(items))

    @classmethod
    def rational(cls, value: Fraction | int | str) -> ExactScalar:
        return cls.of([((0, False), Fraction(value))])

    @classmethod
    def monomial(cls, coeff: Fraction | int | str = 1, pi_exp: int = 0, sqrt2: bool = False) -> ExactScalar:
        return cls.of([((pi_exp, sqrt2), Fraction(coeff))])

    @classmethod
    def zero(cls) -> ExactScalar:
        return cls()

    @classmethod
    def one(cls) -> ExactScalar:
        return cls.rational(1)

    @staticmethod
    def coerce(value: ScalarLike) -> ExactScalar:
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return ExactScalar.rational(value)
        raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")

    # --- structure ---

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def part_one(self) -> dict[int, Fraction]:
        return {b[0]: c for b, c in self.terms if not b[1]}

    def part_sqrt2(self) -> dict[int, Fraction]:
        return {b[0]: c for b, c in self.terms if b[1]}

    def as_rational(self) -> Fraction:
        """Return the value as a Fraction, if it is one."""
        if self.is_zero():
            return Fraction(0)
        if len(self.terms) == 1 and self.terms[0][0] == (0, False):
            return self.terms[0][1]
        raise ValueError(f"{self.pretty()} is not rational")

    # --- arithmetic ---

    def __add__(self, other: ScalarLike) -> ExactScalar:
        other = ExactScalar.coerce(other)
        return ExactScalar.of(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(tuple((b, -c) for b, c in self.terms))

    def __sub__(self, other: ScalarLike) -> ExactScalar:
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other: ScalarLike) -> ExactScalar:
        return ExactScalar.coerce(other) - self

    def __mul__(self, other: ScalarLike) -> ExactScalar:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ExactScalar()
            return ExactScalar(tuple((b, c * other) for b, c in self.terms))
        other = ExactScalar.coerce(other)
        products = []
        for (pa, sa), ca in self.terms:
            for (pb, sb), cb in other.terms:
                coeff = ca * cb
                if sa and sb:
                    coeff *= 2
                products.append(((pa + pb, sa != sb), coeff))
        return ExactScalar.of(products)

    __rmul__ = __mul__

    def inverse(self) -> ExactScalar:
        """Inverse of a unit, i.e. a single term q * sqrt(2)^s * pi^2k."""
        if not self.is_monomial():
            raise NotInvertibleError(f"{self.pretty()} is not a unit of the exact ring")
        (pi_exp, sqrt2), coeff = self.terms[0]
        if sqrt2:
            return ExactScalar.monomial(1 / (2 * coeff), -pi_exp, True)
        return ExactScalar.monomial(1 / coeff, -pi_exp, False)

    def __truediv__(self, other: ScalarLike) -> ExactScalar:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of an exact scalar by zero")
            return self * (1 / Fraction(other))
        return self * ExactScalar.coerce(other).inverse()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.rational(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    # --- serialization ---

    def to_json(self) -> dict:
        return {
            "terms": [
                {"pi_exp": p, "num": str(c.numerator), "den": str(c.denominator), "sqrt2": s}
                for (p, s), c in self.terms
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> ExactScalar:
        try:
            return cls.of(
                ((int(t["pi_exp"]), bool(t["sqrt2"])), Fraction(int(t["num"]), int(t["den"])))
                for t in data["terms"]
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise InvalidArgumentError(f"malformed exact scalar: {data!r}") from e

    # --- rendering ---

    def pretty(self) -> str:
        """Human-readable rendering, highest pi power first, e.g. ``π²/12 + 1/8``."""
        if not self.terms:
            return "0"
        pieces = []
        ordered = sorted(self.terms, key=lambda t: (-t[0][0], t[0][1]))
        for (p, s), c in ordered:
            sign = "-" if c < 0 else "+"
            c = abs(c)
            factors = []
            if s:
                factors.append("√2")
            if p:
                factors.append("π" + (str(p).translate(_SUPERSCRIPTS) if p != 1 else ""))
            body = "·".join(factors)
            if not body:
                text = str(c)
            elif c.numerator == 1 and c.denominator == 1:
                text = body
            elif c.numerator == 1:
                text = f"{body}/{c.denominator}"
            elif c.denominator == 1:
                text = f"{c.numerator}{body}"
            else:
                text = f"{c.numerator}{body}/{c.denominator}"
            pieces.append((sign, text))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"ExactScalar({self.pretty()})"


PI2 = ExactScalar.monomial(1, 2)
SQRT2 = ExactScalar.monomial(1, 0, True)


def scalar_arith(a: ExactScalar, b: ExactScalar, op: str) -> ExactScalar:
    """Ring operation by name: ``add``, ``sub`` or ``mul``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise InvalidArgumentError(f"unknown ring operation: {op}")


def evaluate_numeric(x: ScalarLike, precision: int = 30) -> mpmath.mpf:
    """Evaluate an exact scalar with ``precision`` significant decimal digits."""
    if precision < 15:
        raise InvalidArgumentError(f"precision must be at least 15 digits, got {precision}")
    x = ExactScalar.coerce(x)
    with mpmath.workdps(precision + 10):
        total = mpmath.mpf(0)
        for (p, s), c in x.terms:
            term = mpmath.mpf(c.numerator) / c.denominator * mpmath.pi ** p
            if s:
                term *= mpmath.sqrt(2)
            total += term
    return total
