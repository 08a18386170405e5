"""Truncated power and Laurent series over the exact ring.

A ``TruncSeries`` stores the dense coefficients of ``z^start .. z^(order-1)``
and stands for ``sum c_k z^k + O(z^order)``.  Nothing about the coefficients at
or beyond ``order`` is known; asking for them raises
:class:`~wpvol.errors.TruncationOverflowError` instead of returning zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Mapping

import mpmath

from wpvol.errors import InvalidArgumentError, NotInvertibleError, TruncationOverflowError
from wpvol.ring import ExactScalar, ScalarLike, evaluate_numeric

logger = logging.getLogger(__name__)

PARITIES = ("even", "odd", "none")


def _parity_of(exponent: int) -> str:
    return "even" if exponent % 2 == 0 else "odd"


@dataclass(frozen=True)
class TruncSeries:
    """``sum_{k=start}^{order-1} coefficients[k-start] z^k + O(z^order)``."""

    start: int
    coefficients: tuple[ExactScalar, ...]
    order: int
    parity: str = "none"

    def __post_init__(self) -> None:
        if self.parity not in PARITIES:
            raise InvalidArgumentError(f"unknown parity: {self.parity}")
        if self.start + len(self.coefficients) != self.order:
            raise InvalidArgumentError(
                f"{len(self.coefficients)} coefficients from z^{self.start} do not reach O(z^{self.order})"
            )
        if self.parity != "none":
            for k, c in self.items():
                if _parity_of(k) != self.parity:
                    raise InvalidArgumentError(
                        f"series declared {self.parity} has a nonzero z^{k} coefficient"
                    )

    # --- construction ---

    @classmethod
    def from_terms(
        cls,
        terms: Mapping[int, ScalarLike],
        order: int,
        parity: str = "none",
        start: int | None = None,
    ) -> TruncSeries:
        """Build a series from ``{exponent: coefficient}``; exponents >= order are dropped."""
        kept = {k: ExactScalar.coerce(v) for k, v in terms.items() if k < order}
        if start is None:
            nonzero = [k for k, v in kept.items() if v]
            start = min(nonzero) if nonzero else order
        start = min(start, order)
        coeffs = tuple(kept.get(k, ExactScalar()) for k in range(start, order))
        return cls(start, coeffs, order, parity)

    # --- access ---

    def coefficient(self, k: int) -> ExactScalar:
        if k >= self.order:
            raise TruncationOverflowError(k, self.order)
        if k < self.start:
            return ExactScalar()
        return self.coefficients[k - self.start]

    def __getitem__(self, k: int) -> ExactScalar:
        return self.coefficient(k)

    def items(self) -> Iterator[tuple[int, ExactScalar]]:
        """Nonzero ``(exponent, coefficient)`` pairs in increasing exponent order."""
        for i, c in enumerate(self.coefficients):
            if c:
                yield self.start + i, c

    def valuation(self) -> int:
        """Exponent of the lowest nonzero coefficient (``order`` for O(z^order))."""
        for k, _ in self.items():
            return k
        return self.order

    def truncate(self, order: int) -> TruncSeries:
        if order > self.order:
            raise TruncationOverflowError(order, self.order)
        return TruncSeries.from_terms(dict(self.items()), order, self.parity, start=self.start)

    # --- arithmetic ---

    def __add__(self, other: TruncSeries) -> TruncSeries:
        order = min(self.order, other.order)
        terms: dict[int, ExactScalar] = {}
        for k, c in list(self.items()) + list(other.items()):
            terms[k] = terms.get(k, ExactScalar()) + c
        parity = self.parity if self.parity == other.parity else "none"
        return TruncSeries.from_terms(terms, order, parity)

    def scale(self, factor: ScalarLike) -> TruncSeries:
        return TruncSeries.from_terms(
            {k: c * factor for k, c in self.items()}, self.order, self.parity, start=self.start
        )

    def __neg__(self) -> TruncSeries:
        return self.scale(-1)

    def __sub__(self, other: TruncSeries) -> TruncSeries:
        return self + (-other)

    def __mul__(self, other: TruncSeries) -> TruncSeries:
        return series_mul(self, other)

    def shift(self, k: int) -> TruncSeries:
        """Multiply by ``z^k``."""
        parity = self.parity
        if k % 2 and parity != "none":
            parity = "odd" if parity == "even" else "even"
        return TruncSeries(self.start + k, self.coefficients, self.order + k, parity)

    # --- numerics ---

    def evaluate(self, z: complex, precision: int = 30) -> mpmath.mpc:
        """Numerically sum the stored terms at a (complex) point."""
        with mpmath.workdps(precision + 10):
            z = mpmath.mpc(z)
            total = mpmath.mpc(0)
            for k, c in self.items():
                total += evaluate_numeric(c, precision + 10) * z ** k
        return total

    def pretty(self, var: str = "z") -> str:
        parts = []
        for k, c in self.items():
            text = c.pretty()
            if len(c.terms) > 1:
                text = f"({text})"
            if k == 0:
                parts.append(text)
            elif k == 1:
                parts.append(f"{text}·{var}")
            else:
                parts.append(f"{text}·{var}^{k}")
        parts.append(f"O({var}^{self.order})")
        return " + ".join(parts)


def compose_parity(a: str, b: str) -> str:
    if "none" in (a, b):
        return "none"
    return "even" if a == b else "odd"


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product; the remainder is the lowest one either factor can guarantee."""
    va, vb = a.valuation(), b.valuation()
    order = min(a.order + vb, b.order + va)
    terms: dict[int, ExactScalar] = {}
    for i, ci in a.items():
        for j, cj in b.items():
            if i + j >= order:
                continue
            terms[i + j] = terms.get(i + j, ExactScalar()) + ci * cj
    return TruncSeries.from_terms(
        terms, order, compose_parity(a.parity, b.parity), start=min(a.start + b.start, order)
    )


def series_reciprocal(s: TruncSeries) -> TruncSeries:
    """Inverse series ``1/s``, checked by multiplying back.

    The leading coefficient must be a unit of the exact ring
    (rational times optional sqrt(2) times pi^2k).
    """
    v = s.valuation()
    if v >= s.order:
        raise NotInvertibleError("series is O(z^order) with no known nonzero coefficient")
    lead = s.coefficient(v)
    inv_lead = lead.inverse()

    # s = z^v * u(z),  u known to relative order n_rel
    n_rel = s.order - v
    u = [s.coefficient(v + i) for i in range(n_rel)]
    b: list[ExactScalar] = [inv_lead]
    for n in range(1, n_rel):
        acc = ExactScalar()
        for k in range(1, n + 1):
            if u[k]:
                acc = acc + u[k] * b[n - k]
        b.append(-(acc * inv_lead))

    result = TruncSeries.from_terms(
        {i - v: c for i, c in enumerate(b)}, n_rel - v, s.parity, start=-v
    )
    check = series_mul(s, result)
    expected = {0: ExactScalar.one()}
    for k in range(check.start, check.order):
        if check.coefficient(k) != expected.get(k, ExactScalar()):
            raise ArithmeticError(f"reciprocal check failed at z^{k}")
    logger.debug("reciprocal of series with valuation %d known to O(z^%d)", v, result.order)
    return result
