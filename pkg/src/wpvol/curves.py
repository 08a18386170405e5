"""Spectral curves in the uniformizing coordinate z, with E = -x = z^2 continued to z = i sqrt(E).

Three curves are provided:

    airy      y(z) = c z                        (reference curve, regular edge)
    jt        y(z) = sin(2 pi z) / (4 pi)       (bosonic JT gravity, regular edge)
    jt-super  y(z) = sqrt(2) cos(2 pi z) / z    (super JT gravity, hard edge)

The physical density of states is rho(E) = (e^S / pi) * density_sign * Im y(i sqrt E).
Signs are not fixed by the gravity side; ``density_sign`` makes rho positive.
The recursion only sees y through y(z) - y(-z) = 2 y(z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from wpvol.errors import InvalidArgumentError
from wpvol.ring import ExactScalar
from wpvol.series import TruncSeries

REGULAR = "regular"
HARD = "hard"

CURVE_NAMES = ("airy", "jt", "jt-super")


@dataclass(frozen=True)
class DensityParams:
    """Renormalized entropy S; densities carry the weight e^S."""

    entropy_S: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.entropy_S):
            raise InvalidArgumentError(f"entropy S must be finite, got {self.entropy_S}")


@dataclass(frozen=True)
class SpectralCurve:
    name: str
    y_series: TruncSeries
    edge_class: str
    density_sign: int
    slope: Fraction | None = None  # airy only

    def __post_init__(self) -> None:
        if self.y_series.parity != "odd":
            raise InvalidArgumentError(f"curve {self.name}: y must be an odd series")
        lowest = self.y_series.valuation()
        if (self.edge_class == HARD) != (lowest == -1):
            raise InvalidArgumentError(
                f"curve {self.name}: edge class {self.edge_class} does not match lowest exponent {lowest}"
            )

    @property
    def curve_id(self) -> str:
        return self.name

    @property
    def order(self) -> int:
        """Highest exponent of y known exactly."""
        return self.y_series.order - 1

    def y(self, z: complex) -> mpmath.mpc:
        """Closed-form y(z), not truncated."""
        z = mpmath.mpc(z)
        if self.name == "jt":
            return mpmath.sin(2 * mpmath.pi * z) / (4 * mpmath.pi)
        if self.name == "jt-super":
            return mpmath.sqrt(2) * mpmath.cos(2 * mpmath.pi * z) / z
        return mpmath.mpf(self.slope.numerator) / self.slope.denominator * z

    def y_squared_closed_form(self, E: float) -> mpmath.mpf:
        """Right-hand side of the curve equation y^2 as a function of E."""
        E = mpmath.mpf(E)
        if self.name == "jt":
            return -mpmath.sinh(2 * mpmath.pi * mpmath.sqrt(E)) ** 2 / (16 * mpmath.pi ** 2)
        if self.name == "jt-super":
            return -(2 / E) * mpmath.cosh(2 * mpmath.pi * mpmath.sqrt(E)) ** 2
        c = mpmath.mpf(self.slope.numerator) / self.slope.denominator
        return -(c ** 2) * E


def _check_order(order: int) -> None:
    if order < 3:
        raise InvalidArgumentError(f"curve order must be at least 3, got {order}")


def curve_airy(slope: Fraction | int | str = Fraction(1, 2), order: int = 21) -> SpectralCurve:
    """y(z) = slope * z, exactly; all higher coefficients are known zeros through z^order."""
    slope = Fraction(slope)
    if slope == 0:
        raise InvalidArgumentError("Airy curve slope must be nonzero")
    _check_order(order)
    series = TruncSeries.from_terms({1: slope}, order + 1, parity="odd", start=1)
    sign = 1 if slope > 0 else -1
    return SpectralCurve(f"airy-{slope}", series, REGULAR, sign, slope=slope)


def curve_jt(order: int = 21) -> SpectralCurve:
    """Taylor series of sin(2 pi z)/(4 pi) through z^order."""
    _check_order(order)
    terms = {}
    for k in range(order // 2 + 1):
        if 2 * k + 1 > order:
            break
        coeff = Fraction((-1) ** k * 2 ** (2 * k + 1), 4 * math.factorial(2 * k + 1))
        terms[2 * k + 1] = ExactScalar.monomial(coeff, 2 * k)
    series = TruncSeries.from_terms(terms, order + 1, parity="odd", start=1)
    return SpectralCurve("jt", series, REGULAR, 1)


def curve_jt_super(order: int = 21) -> SpectralCurve:
    """Laurent series of sqrt(2) cos(2 pi z)/z through z^order."""
    _check_order(order)
    terms = {}
    for k in range(order // 2 + 2):
        if 2 * k - 1 > order:
            break
        coeff = Fraction((-1) ** k * 2 ** (2 * k), math.factorial(2 * k))
        terms[2 * k - 1] = ExactScalar.monomial(coeff, 2 * k, sqrt2=True)
    series = TruncSeries.from_terms(terms, order + 1, parity="odd", start=-1)
    # Im y(i sqrt E) = -sqrt(2) cosh(2 pi sqrt E)/sqrt(E) < 0
    return SpectralCurve("jt-super", series, HARD, -1)


def default_order(max_genus: int, g: int = 1, n: int = 1) -> int:
    """Truncation order sufficient for every (g', n') reached from (g, n).

    Residues at (g, n) need 1/(4y) through z^(2(3g-3+n)-1); on a regular curve
    that takes y through z^(2(3g-3+n)+1).
    """
    return max(2 * (3 * max_genus - 1) + 3, 2 * (3 * g - 3 + n) + 1, 3)


def make_curve(name: str, order: int, slope: Fraction | None = None) -> SpectralCurve:
    if name == "airy":
        return curve_airy(slope if slope is not None else Fraction(1, 2), order)
    if name == "jt":
        return curve_jt(order)
    if name == "jt-super":
        return curve_jt_super(order)
    raise InvalidArgumentError(f"unknown curve {name!r}; expected one of {', '.join(CURVE_NAMES)}")


def density_of_states(curve: SpectralCurve, E: float, params: DensityParams | None = None) -> mpmath.mpf:
    """rho(E) = (e^S/pi) * density_sign * Im y(i sqrt E) from the closed-form curve."""
    if params is None:
        params = DensityParams()
    if not E > 0:
        raise InvalidArgumentError(f"density needs E > 0, got {E}")
    z = mpmath.mpc(0, mpmath.sqrt(E))
    value = curve.density_sign * mpmath.im(curve.y(z)) / mpmath.pi
    return mpmath.exp(params.entropy_S) * value


def continuation_residual(curve: SpectralCurve, E: float, precision: int = 30) -> mpmath.mpf:
    """Relative mismatch between y(i sqrt E)^2 summed from the exact series and the curve equation."""
    z = mpmath.mpc(0, mpmath.sqrt(E))
    with mpmath.workdps(precision + 10):
        lhs = curve.y_series.evaluate(z, precision) ** 2
        rhs = curve.y_squared_closed_form(E)
        return abs(lhs - rhs) / abs(rhs)
