"""Histograms, reference densities, KS statistics, edge-slope fits and quadrature oracles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy import integrate, stats

from wpvol.errors import InvalidArgumentError
from wpvol.storage import csv_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceDensity:
    name: str
    pdf: Callable[[float], float]
    support: tuple[float, float]
    singular_at: float | None = None

    def mass(self, a: float, b: float) -> float:
        lo, hi = max(a, self.support[0]), min(b, self.support[1])
        if hi <= lo:
            return 0.0
        points = [self.singular_at] if self.singular_at is not None and lo < self.singular_at < hi else None
        value, _ = integrate.quad(self.pdf, lo, hi, points=points, limit=200, epsabs=1e-12, epsrel=1e-10)
        return value

    def cdf(self, grid_size: int = 2001) -> Callable[[np.ndarray], np.ndarray]:
        """CDF by quadrature between consecutive grid points, linearly interpolated."""
        grid = _cdf_grid(self.name, grid_size)
        return lambda x: np.interp(x, grid[0], grid[1], left=0.0, right=1.0)


def _semicircle(x: float) -> float:
    return 2.0 / math.pi * math.sqrt(max(0.0, 1.0 - x * x))


def _marchenko_pastur(x: float) -> float:
    if x <= 0.0 or x >= 4.0:
        return 0.0
    return math.sqrt((4.0 - x) / x) / (2.0 * math.pi)


def _uniform(x: float) -> float:
    return 1.0 if 0.0 <= x <= 1.0 else 0.0


def _scalar_gaussian(x: float) -> float:
    """exp(-x^2) normalized: the N = 1 law for T(l) = l^2."""
    return math.exp(-x * x) / math.sqrt(math.pi)


REFERENCES = {
    "semicircle": ReferenceDensity("semicircle", _semicircle, (-1.0, 1.0)),
    "marchenko-pastur": ReferenceDensity("marchenko-pastur", _marchenko_pastur, (0.0, 4.0), singular_at=0.0),
    "uniform": ReferenceDensity("uniform", _uniform, (0.0, 1.0)),
    "scalar-gaussian": ReferenceDensity("scalar-gaussian", _scalar_gaussian, (-8.0, 8.0)),
}


def reference_density(name: str) -> ReferenceDensity:
    try:
        return REFERENCES[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown reference density {name!r}; expected one of {', '.join(REFERENCES)}"
        ) from None


@lru_cache(maxsize=16)
def _cdf_grid(name: str, grid_size: int) -> tuple[np.ndarray, np.ndarray]:
    ref = REFERENCES[name]
    grid = np.linspace(ref.support[0], ref.support[1], grid_size)
    pieces = [ref.mass(a, b) for a, b in zip(grid[:-1], grid[1:])]
    values = np.concatenate([[0.0], np.cumsum(pieces)])
    return grid, values / values[-1]


@dataclass
class HistogramStats:
    edges: np.ndarray
    density: np.ndarray
    samples: int
    reference: str | None = None
    ks_statistic: float | None = None
    ks_pvalue: float | None = None
    sup_distance: float | None = None
    edge_slope: float | None = None

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def integral(self) -> float:
        return float(np.sum(self.density * np.diff(self.edges)))

    def to_csv(self, comments: dict | None = None) -> str:
        rows = ([repr(float(c)), repr(float(d))] for c, d in zip(self.centers, self.density))
        return csv_text(["x", "density"], rows, comments)

    def summary(self) -> dict:
        return {
            "samples": self.samples,
            "bins": len(self.density),
            "reference": self.reference,
            "ks_statistic": self.ks_statistic,
            "ks_pvalue": self.ks_pvalue,
            "sup_distance": self.sup_distance,
            "edge_slope": self.edge_slope,
        }


def histogram_and_stats(
    values,
    reference: str | None = None,
    bins: int = 40,
    value_range: tuple[float, float] | None = None,
    slope_window: tuple[float, float] | None = None,
) -> HistogramStats:
    """Normalized histogram of pooled eigenvalues, with KS and sup-distance against a reference.

    The default range covers the observed support. The sup-distance compares each
    bin with the reference mass of that bin divided by its width.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise InvalidArgumentError("cannot histogram an empty batch")
    if bins < 1:
        raise InvalidArgumentError(f"bin count must be positive, got {bins}")
    lo, hi = value_range if value_range is not None else (float(values.min()), float(values.max()))
    if not hi > lo:
        raise InvalidArgumentError(f"zero-width histogram range [{lo}, {hi}]")
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    inside = counts.sum()
    if inside == 0:
        raise InvalidArgumentError(f"no samples fall in [{lo}, {hi}]")
    density = counts / (inside * np.diff(edges))
    out = HistogramStats(edges, density, int(values.size))

    if reference is not None:
        ref = reference_density(reference)
        result = stats.kstest(values, ref.cdf())
        out.reference = reference
        out.ks_statistic = float(result.statistic)
        out.ks_pvalue = float(result.pvalue)
        expected = np.array([ref.mass(a, b) / (b - a) for a, b in zip(edges[:-1], edges[1:])])
        # histogram is normalized over [lo, hi]; rescale the reference the same way
        covered = ref.mass(lo, hi)
        if covered > 0:
            expected = expected / covered
        out.sup_distance = float(np.max(np.abs(density - expected)))
    if slope_window is not None:
        out.edge_slope = fit_edge_slope(values, slope_window)
    return out


def fit_edge_slope(values, log_window: tuple[float, float] = (-6.0, -2.0), bins: int = 8) -> float:
    """Least-squares slope of log density against log E on log-spaced bins in the window."""
    values = np.asarray(values, dtype=float).ravel()
    positive = values[values > 0]
    if positive.size == 0:
        raise InvalidArgumentError("edge-slope fit needs positive samples")
    a, b = log_window
    if not b > a:
        raise InvalidArgumentError(f"empty log window {log_window}")
    edges = np.exp(np.linspace(a, b, bins + 1))
    counts, _ = np.histogram(positive, bins=edges)
    keep = counts > 0
    if keep.sum() < 2:
        raise InvalidArgumentError(f"too few samples in log window {log_window} for a slope fit")
    density = counts[keep] / (values.size * np.diff(edges)[keep])
    centers = 0.5 * (np.log(edges[:-1]) + np.log(edges[1:]))[keep]
    slope, _ = np.polyfit(centers, np.log(density), 1)
    logger.debug("edge slope on %s from %d samples: %.4f", log_window, int(counts.sum()), slope)
    return float(slope)


def lowest_mass(values, threshold: float, total: int | None = None) -> float:
    """Fraction of samples below threshold."""
    values = np.asarray(values, dtype=float).ravel()
    total = total or values.size
    return float(np.count_nonzero(values < threshold) / total)


def hard_edge_threshold(N: int) -> float:
    """Ten hard-edge spacings, 10 / (4 N^2)."""
    return 10.0 / (4.0 * N * N)


def q_symmetry_distance(q_values, bins: int = 41) -> float:
    """sup |f(mu) - f(-mu)| over a histogram symmetric about 0.

    An odd bin count keeps 0 at a bin centre, so zero modes cannot split.
    """
    q_values = np.asarray(q_values, dtype=float).ravel()
    r = float(np.max(np.abs(q_values))) or 1.0
    counts, edges = np.histogram(q_values, bins=bins, range=(-r, r))
    density = counts / (q_values.size * np.diff(edges))
    return float(np.max(np.abs(density - density[::-1])))


def q_pairing_error(q_rows) -> float:
    """Largest |mu_k + mu_(M-1-k)| over ascending rows, relative to the largest |mu|."""
    q_rows = np.atleast_2d(np.asarray(q_rows, dtype=float))
    scale = float(np.max(np.abs(q_rows))) or 1.0
    return float(np.max(np.abs(q_rows + q_rows[:, ::-1]))) / scale


def zero_mode_counts(q_rows, tol: float = 1e-8) -> np.ndarray:
    """Eigenvalues with |mu| < tol, per row."""
    q_rows = np.atleast_2d(np.asarray(q_rows, dtype=float))
    return np.count_nonzero(np.abs(q_rows) < tol, axis=1)


def mean_with_error(values) -> tuple[float, float]:
    """Sample mean and its standard error."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2:
        raise InvalidArgumentError("need at least two samples for a standard error")
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def two_eigenvalue_moment(potential_coeffs, precision: int = 20) -> float:
    """<l^2> for N = 2 under (l1 - l2)^2 exp(-2 (T(l1) + T(l2))) by 2-D quadrature."""
    coeffs = [mpmath.mpf(c.numerator) / c.denominator if hasattr(c, "numerator") else mpmath.mpf(c) for c in potential_coeffs]

    def T(x):
        return mpmath.polyval(coeffs[::-1], x)

    with mpmath.workdps(precision):
        weight = lambda x, y: (x - y) ** 2 * mpmath.exp(-2 * (T(x) + T(y)))  # noqa: E731
        box = [-mpmath.inf, 0, mpmath.inf]
        Z = mpmath.quad(weight, box, box)
        M = mpmath.quad(lambda x, y: weight(x, y) * (x * x + y * y) / 2, box, box)
        return float(M / Z)
