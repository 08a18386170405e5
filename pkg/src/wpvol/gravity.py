"""Volumes, JT partition functions and their Laplace-transform consistency checks.

Dictionaries used throughout:

    correlator -> volume     c / z^(2k+2)      ->  c b^(2k) / (2k+1)!
    volume -> gluing         integral b db Theta(b; beta) b^(2k) = k! 4^k beta^(k+1/2) / sqrt(pi)
    correlator -> Z(beta)    W(z) = 2z integral dbeta e^(-beta z^2) Z(beta),
                             so c / z^(2k+2) -> c 2^k beta^(k+1/2) / ((2k+1)!! sqrt(pi))

The trumpet is Theta(b; beta) = exp(-b^2 / 4 beta) / (2 sqrt(pi beta)).  With it the
gluing and direct-correlator pipelines agree with convention constant 1.

Volumes follow the matrix-model convention V_{1,1} = b^2/48 + pi^2/12; the
classical convention is twice that at (1,1) only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from wpvol.curves import HARD, DensityParams, SpectralCurve, curve_jt, curve_jt_super, density_of_states
from wpvol.errors import InvalidArgumentError
from wpvol.models import Correlator, PartitionClosedForm, PartitionTerm, VolumePolynomial
from wpvol.recursion import RecursionEngine
from wpvol.ring import ExactScalar, evaluate_numeric

logger = logging.getLogger(__name__)

CONVENTIONS = ("jt", "mirzakhani")
PIPELINES = ("gluing", "correlator")


def _double_factorial_odd(k: int) -> int:
    """(2k+1)!!"""
    out = 1
    for odd in range(1, 2 * k + 2, 2):
        out *= odd
    return out


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise InvalidArgumentError(f"{name} must be positive, got {value}")


# ---------------------------------------------------------------------------
# volumes
# ---------------------------------------------------------------------------


def volume_from_correlator(w: Correlator, convention: str = "jt") -> VolumePolynomial:
    """Inverse Laplace transform of omega_{g,n}, leg by leg."""
    if convention not in CONVENTIONS:
        raise InvalidArgumentError(f"unknown convention {convention!r}; expected jt or mirzakhani")
    terms = {}
    for ks, c in w.expanded().items():
        denom = 1
        for k in ks:
            denom *= math.factorial(2 * k + 1)
        terms[ks] = c * Fraction(1, denom)
    volume = VolumePolynomial(w.key.g, w.key.n, dict(sorted(terms.items())), "jt")
    if convention == "mirzakhani":
        factor = 2 if (w.key.g, w.key.n) == (1, 1) else 1
        volume = volume.scaled(factor)
        volume.convention = "mirzakhani"
    return volume


def evaluate_volume(V: VolumePolynomial, b: Sequence[float], precision: int = 30) -> mpmath.mpf:
    if len(b) != V.n:
        raise InvalidArgumentError(f"V_({V.g},{V.n}) takes {V.n} lengths, got {len(b)}")
    if any(x < 0 for x in b):
        raise InvalidArgumentError(f"boundary lengths must be non-negative, got {list(b)}")
    with mpmath.workdps(precision + 10):
        lengths = [mpmath.mpf(x) for x in b]
        total = mpmath.mpf(0)
        for degrees, c in V.terms.items():
            mono = mpmath.mpf(1)
            for x, d in zip(lengths, degrees):
                mono *= x ** (2 * d)
            total += evaluate_numeric(c, precision + 10) * mono
        return total


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def disc_closed_form() -> PartitionClosedForm:
    """Z_disc = e^S pi^(-1/2) (1/4) beta^(-3/2) exp(pi^2/beta)."""
    return PartitionClosedForm(1, [PartitionTerm(Fraction(-3, 2), ExactScalar.rational(Fraction(1, 4)), True)])


def disc_partition(beta: float, S: float = 0.0) -> mpmath.mpf:
    _positive("beta", beta)
    return disc_closed_form().evaluate(beta, S)


def trumpet(b: float, beta: float) -> mpmath.mpf:
    """Theta(b; beta) = exp(-b^2/4beta) / (2 sqrt(pi beta))."""
    _positive("beta", beta)
    if b < 0:
        raise InvalidArgumentError(f"b must be non-negative, got {b}")
    b, beta = mpmath.mpf(b), mpmath.mpf(beta)
    return mpmath.exp(-b ** 2 / (4 * beta)) / (2 * mpmath.sqrt(mpmath.pi * beta))


def double_trumpet(beta1: float, beta2: float) -> mpmath.mpf:
    """Z_{0,2} = integral b db Theta(b; beta1) Theta(b; beta2) = sqrt(beta1 beta2) / (2 pi (beta1 + beta2))."""
    _positive("beta1", beta1)
    _positive("beta2", beta2)
    b1, b2 = mpmath.mpf(beta1), mpmath.mpf(beta2)
    return mpmath.sqrt(b1 * b2) / (2 * mpmath.pi * (b1 + b2))


def gluing_closed_form(V: VolumePolynomial) -> PartitionClosedForm:
    """Glue one trumpet onto V_{g,1} using the Gaussian moments of b db."""
    if V.n != 1:
        raise InvalidArgumentError(f"gluing a single trumpet needs n = 1, got n = {V.n}")
    terms = [
        PartitionTerm(Fraction(2 * d + 1, 2), c * (math.factorial(d) * 4 ** d))
        for (d,), c in sorted(V.terms.items())
    ]
    return PartitionClosedForm(1 - 2 * V.g, terms)


def correlator_closed_form(w: Correlator) -> PartitionClosedForm:
    """Invert W(z) = 2z integral e^(-beta z^2) Z(beta) dbeta term by term."""
    if w.key.n != 1:
        raise InvalidArgumentError(f"direct transform needs n = 1, got n = {w.key.n}")
    terms = [
        PartitionTerm(Fraction(2 * k + 1, 2), c * Fraction(2 ** k, _double_factorial_odd(k)))
        for (k,), c in sorted(w.terms.items())
    ]
    return PartitionClosedForm(1 - 2 * w.key.g, terms)


def _require_genus(g: int) -> None:
    if g < 1:
        raise InvalidArgumentError("genus 0 with one boundary is the disc; use disc_partition")


def _engine_or_default(engine: RecursionEngine | None, g: int) -> RecursionEngine:
    if engine is None:
        engine = RecursionEngine(curve_jt(max(21, 6 * g + 3)))
    return engine


def _physical_sign(curve: SpectralCurve, g: int, n: int = 1) -> int:
    # omega_{g,n} is homogeneous of degree 2 - 2g - n in y
    return curve.density_sign ** (2 * g - 2 + n)


def genus_closed_form(g: int, engine: RecursionEngine | None = None, pipeline: str = "gluing") -> PartitionClosedForm:
    """Z_g(beta) on the engine's curve, by trumpet gluing or by the direct correlator transform.

    The curve's density sign is carried through, so a curve whose y is the
    negative of the physical density (the super curve) yields physical Z_g.
    """
    _require_genus(g)
    if pipeline not in PIPELINES:
        raise InvalidArgumentError(f"unknown pipeline {pipeline!r}; expected gluing or correlator")
    engine = _engine_or_default(engine, g)
    w = engine.compute_correlator(g, 1)
    form = gluing_closed_form(volume_from_correlator(w)) if pipeline == "gluing" else correlator_closed_form(w)
    sign = _physical_sign(engine.curve, g)
    if sign != 1:
        form = PartitionClosedForm(
            form.chi, [PartitionTerm(t.beta_power, -t.coeff, t.has_exp_pi2_over_beta) for t in form.terms]
        )
    return form


def genus_partition_via_gluing(g: int, beta: float, S: float = 0.0, engine: RecursionEngine | None = None) -> mpmath.mpf:
    """e^(S(1-2g)) integral_0^inf b db Theta(b; beta) V_{g,1}(b)."""
    _require_genus(g)
    _positive("beta", beta)
    return genus_closed_form(g, engine, "gluing").evaluate(beta, S)


def genus_partition_via_correlator(g: int, beta: float, S: float = 0.0, engine: RecursionEngine | None = None) -> mpmath.mpf:
    _require_genus(g)
    _positive("beta", beta)
    return genus_closed_form(g, engine, "correlator").evaluate(beta, S)


def _exact_ratio(a: dict, b: dict) -> Fraction | None:
    """Rational r with a = r * b termwise, or None."""
    if a.keys() != b.keys() or not a:
        return None
    key = next(iter(a))
    r = a[key].terms[0][1] / b[key].terms[0][1]
    if all(a[k] == b[k] * r for k in a):
        return r
    return None


def convention_constant(g: int, engine: RecursionEngine | None = None) -> Fraction | None:
    """Exact ratio (direct-correlator Z_g) / (gluing Z_g); None if not proportional."""
    engine = _engine_or_default(engine, g)
    direct = genus_closed_form(g, engine, "correlator").as_map()
    glued = genus_closed_form(g, engine, "gluing").as_map()
    return _exact_ratio(direct, glued)


def multi_boundary_partition(V: VolumePolynomial, betas: Sequence[float], S: float = 0.0, precision: int = 30) -> mpmath.mpf:
    """e^(S chi) integral prod b_i db_i Theta(b_i; beta_i) V_{g,n}(b), chi = 2 - 2g - n."""
    if len(betas) != V.n:
        raise InvalidArgumentError(f"V_({V.g},{V.n}) needs {V.n} temperatures, got {len(betas)}")
    for beta in betas:
        _positive("beta", beta)
    with mpmath.workdps(precision + 10):
        bs = [mpmath.mpf(x) for x in betas]
        total = mpmath.mpf(0)
        for degrees, c in V.terms.items():
            value = evaluate_numeric(c, precision + 10)
            for beta, d in zip(bs, degrees):
                value *= math.factorial(d) * 4 ** d * beta ** (d + mpmath.mpf(1) / 2) / mpmath.sqrt(mpmath.pi)
            total += value
        return mpmath.exp(S * (2 - 2 * V.g - V.n)) * total


@dataclass
class GenusExpansion:
    beta: float
    S: float
    contributions: list[tuple[str, mpmath.mpf]]

    @property
    def total(self) -> mpmath.mpf:
        return mpmath.fsum(v for _, v in self.contributions)


def genus_expansion(beta: float, S: float, g_max: int, engine: RecursionEngine | None = None) -> GenusExpansion:
    """Z(beta) ~ Z_disc + sum_{g=1}^{g_max} e^(S(1-2g)) Z_g(beta), term by term.

    On a hard-edge curve the leading term is the super disc; the genus weights
    are the same.
    """
    _positive("beta", beta)
    engine = _engine_or_default(engine, g_max)
    disc = super_disc_partition if engine.curve.edge_class == HARD else disc_partition
    contributions = [("disc", disc(beta, S))]
    for g in range(1, g_max + 1):
        contributions.append((f"g={g}", genus_partition_via_gluing(g, beta, S, engine)))
    return GenusExpansion(beta, S, contributions)


# ---------------------------------------------------------------------------
# super JT
# ---------------------------------------------------------------------------


def super_disc_density(E: float, S: float = 0.0) -> mpmath.mpf:
    """(e^S sqrt(2)/pi) cosh(2 pi sqrt E) / sqrt E."""
    if not E > 0:
        raise InvalidArgumentError(f"density needs E > 0, got {E}")
    E = mpmath.mpf(E)
    return mpmath.exp(S) * mpmath.sqrt(2) / mpmath.pi * mpmath.cosh(2 * mpmath.pi * mpmath.sqrt(E)) / mpmath.sqrt(E)


def super_disc_partition(beta: float, S: float = 0.0) -> mpmath.mpf:
    """Laplace transform of the super density: sqrt(2) e^S exp(pi^2/beta) / sqrt(pi beta)."""
    _positive("beta", beta)
    beta = mpmath.mpf(beta)
    return mpmath.sqrt(2) * mpmath.exp(S) * mpmath.exp(mpmath.pi ** 2 / beta) / mpmath.sqrt(mpmath.pi * beta)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def _tail_cutoff(beta: mpmath.mpf, envelope: mpmath.mpf, scale: mpmath.mpf, tol: float) -> mpmath.mpf:
    """E_max with integral_{E_max}^inf envelope * exp(-beta E / 2) dE below tol * scale / 100.

    Beyond (4 pi / beta)^2 the growth exp(2 pi sqrt E) is dominated by exp(beta E / 2).
    """
    e1 = max((4 * mpmath.pi / beta) ** 2, mpmath.mpf(1))
    e2 = (2 / beta) * mpmath.log(200 * envelope / (beta * tol * scale))
    return max(e1, e2)


def laplace_transform(
    density: Callable[[mpmath.mpf], mpmath.mpf],
    beta: float,
    tol: float = 1e-10,
    envelope: float = 1.0,
) -> mpmath.mpf:
    """integral_0^inf density(E) exp(-beta E) dE by tanh-sinh quadrature on a truncated range.

    ``envelope`` bounds density(E) exp(-2 pi sqrt E) for E >= 1.
    """
    _positive("beta", beta)
    digits = max(15, int(-math.log10(tol)) + 5)
    with mpmath.workdps(digits):
        beta = mpmath.mpf(beta)
        f = lambda E: density(E) * mpmath.exp(-beta * E)  # noqa: E731
        peak = (mpmath.pi / beta) ** 2
        e1 = max((4 * mpmath.pi / beta) ** 2, mpmath.mpf(1))
        bulk = mpmath.quad(f, [0, min(peak, e1), e1])
        e_max = _tail_cutoff(beta, mpmath.mpf(envelope), abs(bulk), tol)
        tail = mpmath.quad(f, [e1, e_max]) if e_max > e1 else mpmath.mpf(0)
        logger.debug("laplace beta=%s: E_max=%s, bulk=%s, tail=%s", beta, e_max, bulk, tail)
        return bulk + tail


@dataclass
class QuadratureCheck:
    beta: float
    quadrature: mpmath.mpf
    closed_form: mpmath.mpf

    @property
    def relative_error(self) -> float:
        return float(abs(self.quadrature - self.closed_form) / abs(self.closed_form))


def disc_laplace_check(beta: float, S: float = 0.0, tol: float = 1e-10, curve: SpectralCurve | None = None) -> QuadratureCheck:
    """Quadrature of the JT disc density against the closed-form disc partition function."""
    curve = curve or curve_jt()
    params = DensityParams(S)
    quad = laplace_transform(
        lambda E: density_of_states(curve, E, params), beta, tol, envelope=math.exp(S) / (8 * math.pi ** 2)
    )
    return QuadratureCheck(beta, quad, disc_partition(beta, S))


def super_laplace_check(beta: float, S: float = 0.0, tols: tuple[float, float] = (1e-8, 1e-12)) -> tuple[QuadratureCheck, QuadratureCheck]:
    """Super disc density transformed at two tolerances, each against the closed form."""
    curve = curve_jt_super()
    params = DensityParams(S)
    closed = super_disc_partition(beta, S)
    out = []
    for tol in tols:
        quad = laplace_transform(
            lambda E: density_of_states(curve, E, params), beta, tol, envelope=math.exp(S) * math.sqrt(2) / math.pi
        )
        out.append(QuadratureCheck(beta, quad, closed))
    return out[0], out[1]
