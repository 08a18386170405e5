"""Acceptance suite: exact volumes, Laplace and gluing consistency, super closed forms, matrix-lab laws.

Reports are deterministic: no timestamps or timings, floats written with repr,
random streams seeded from the configuration. Two runs with the same
configuration produce byte-identical reports.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import mpmath
import numpy as np

from wpvol import __version__, gravity
from wpvol.config import Settings
from wpvol.curves import DensityParams, curve_airy, curve_jt, curve_jt_super, density_of_states, continuation_residual
from wpvol.errors import InvalidArgumentError, WpvolError
from wpvol.matrixlab import ensembles, stats
from wpvol.matrixlab.metropolis import ChainParams
from wpvol.models import PartitionClosedForm, PartitionTerm, VolumePolynomial, is_stable
from wpvol.recursion import RecursionEngine, residue_oracle
from wpvol.ring import ExactScalar

logger = logging.getLogger(__name__)

GOLDEN_FILE = Path(__file__).with_name("golden.json")
SUITES = ("fast", "full")
Q_BLOCK_N = 40
Q_BLOCK_DRAWS = 100


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class CheckReport:
    suite: str
    criteria: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def failed(self) -> list[CriterionResult]:
        return [c for c in self.criteria if not c.passed]

    def to_json(self, meta: dict | None = None) -> dict:
        data = dict(meta or {})
        data.update(
            {
                "suite": self.suite,
                "passed": self.passed,
                "criteria": [c.to_json() for c in self.criteria],
            }
        )
        return data


def _filter_zero(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v}


def _pretty_terms(terms: dict) -> dict[str, str]:
    return {",".join(map(str, k)): v.pretty() for k, v in sorted(terms.items())}


def load_golden(path: Path) -> list[VolumePolynomial]:
    try:
        data = json.loads(path.read_text())
        return [VolumePolynomial.from_json(v) for v in data["volumes"]]
    except (OSError, ValueError, KeyError, TypeError, WpvolError) as exc:
        raise InvalidArgumentError(f"golden file {path} is unreadable: {exc}") from exc


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def check_exact_volumes(golden_path: Path) -> CriterionResult:
    engine = RecursionEngine(curve_jt())
    detail: dict[str, Any] = {}
    ok = True
    try:
        golden = load_golden(golden_path)
    except InvalidArgumentError as exc:
        return CriterionResult(1, "exact-volumes", False, {"error": str(exc)})
    for expected in golden:
        label = f"V_({expected.g},{expected.n})"
        w = engine.compute_correlator(expected.g, expected.n)
        oracle = _filter_zero(residue_oracle(engine.curve, expected.g, expected.n))
        oracle_ok = _filter_zero(w.terms) == oracle
        volume = gravity.volume_from_correlator(w)
        golden_ok = _filter_zero(volume.terms) == _filter_zero(expected.terms)
        ok &= oracle_ok and golden_ok
        detail[label] = {
            "computed": volume.pretty(),
            "golden": expected.pretty(),
            "matches_golden": golden_ok,
            "matches_residue_oracle": oracle_ok,
        }
    return CriterionResult(1, "exact-volumes", ok, detail)


def stable_range(max_euler: int) -> list[tuple[int, int]]:
    return [
        (g, n)
        for g in range(0, max_euler // 2 + 2)
        for n in range(1, max_euler + 3)
        if is_stable(g, n) and 2 * g - 2 + n <= max_euler
    ]


def check_volume_table(max_euler: int, workers: int = 1) -> CriterionResult:
    """Symmetry, degree and leading-term universality for every V_{g,n} with 2g-2+n <= max_euler."""
    jt = RecursionEngine(curve_jt())
    airy = RecursionEngine(curve_airy(Fraction(1, 2)))
    targets = stable_range(max_euler)
    jt.compute_many(targets, workers)
    airy.compute_many(targets, workers)
    failures = []
    for g, n in targets:
        V = gravity.volume_from_correlator(jt.compute_correlator(g, n))
        A = gravity.volume_from_correlator(airy.compute_correlator(g, n))
        top = {d: c for d, c in V.terms.items() if sum(d) == 3 * g - 3 + n}
        reasons = []
        if not V.is_symmetric():
            reasons.append("not symmetric")
        if V.total_degree() != 3 * g - 3 + n:
            reasons.append(f"total degree {V.total_degree()}")
        if _filter_zero(top) != _filter_zero(A.terms):
            reasons.append("leading terms differ from the Airy image")
        if reasons:
            failures.append(f"V_({g},{n}): {', '.join(reasons)}")
    return CriterionResult(
        2, "volume-table", not failures, {"max_euler": max_euler, "volumes": len(targets), "failures": failures}
    )


def check_disc_laplace(tol: float) -> CriterionResult:
    rows = {}
    ok = True
    for beta in (0.5, 1.0, 2.0):
        result = gravity.disc_laplace_check(beta, 0.0, tol)
        err = result.relative_error
        ok &= err <= 1e-6
        rows[repr(beta)] = {"closed_form": mpmath.nstr(result.closed_form, 15), "relative_error": float(f"{err:.3e}")}
    return CriterionResult(3, "disc-laplace", ok, rows)


def check_gluing() -> CriterionResult:
    engine = RecursionEngine(curve_jt())
    closed = gravity.gluing_closed_form(gravity.volume_from_correlator(engine.compute_correlator(1, 1))).as_map()
    expected = PartitionClosedForm(
        -1,
        [
            PartitionTerm(Fraction(3, 2), ExactScalar.rational(Fraction(1, 12))),
            PartitionTerm(Fraction(1, 2), ExactScalar.monomial(Fraction(1, 12), 2)),
        ],
    ).as_map()
    ratios = {g: gravity.convention_constant(g, engine) for g in (1, 2)}
    hard = RecursionEngine(curve_jt_super())
    super_ratios = {g: gravity.convention_constant(g, hard) for g in (1, 2)}
    ok = closed == expected and all(r == 1 for r in (*ratios.values(), *super_ratios.values()))
    return CriterionResult(
        4,
        "gluing",
        ok,
        {
            "genus_one_matches": closed == expected,
            "convention_constant": {str(g): (str(r) if r is not None else None) for g, r in ratios.items()},
            "super_convention_constant": {
                str(g): (str(r) if r is not None else None) for g, r in super_ratios.items()
            },
        },
    )


def check_super_closed_forms() -> CriterionResult:
    curve = curve_jt_super(81)
    ok = True
    rows = {}
    with mpmath.workdps(50):
        for E in (0.1, 1.0, 5.0):
            formula = gravity.super_disc_density(E)
            independent = density_of_states(curve, E, DensityParams())
            density_err = float(abs(formula - independent) / abs(independent))
            curve_err = float(continuation_residual(curve, E, 40))
            ok &= density_err <= 1e-10 and curve_err <= 1e-10
            rows[repr(E)] = {"density_error": float(f"{density_err:.3e}"), "curve_error": float(f"{curve_err:.3e}")}
    return CriterionResult(5, "super-closed-forms", ok, rows)


def check_super_oracle() -> CriterionResult:
    engine = RecursionEngine(curve_jt_super())
    ok = True
    rows = {}
    for g, n in ((1, 1), (0, 4)):
        computed = _filter_zero(engine.compute_correlator(g, n).terms)
        oracle = _filter_zero(residue_oracle(engine.curve, g, n))
        same = computed == oracle
        ok &= same
        rows[f"omega_({g},{n})"] = {"recursion": _pretty_terms(computed), "oracle": _pretty_terms(oracle), "equal": same}
    return CriterionResult(6, "super-oracle", ok, rows)


def check_semicircle(settings: Settings) -> CriterionResult:
    config = ensembles.EnsembleConfig(N=200, kind=ensembles.GAUSSIAN, seed=settings.seed, draws=200, chains=settings.mc_chains)
    batch = ensembles.sample_gaussian(config, settings.mc_workers)
    h = stats.histogram_and_stats(batch.pooled(), "semicircle", bins=40, value_range=(-1.1, 1.1))
    return CriterionResult(
        7, "semicircle", h.sup_distance <= 0.03, {"N": 200, "draws": 200, "sup_distance": round(h.sup_distance, 6)}
    )


def check_hard_edge(settings: Settings) -> CriterionResult:
    N = 100
    masses = {}
    zero_modes = {}
    slope = None
    q_distance = pairing = None
    for nu in (0, 2):
        config = ensembles.EnsembleConfig(
            N=N, kind=ensembles.SUSY, nu=nu, seed=settings.seed, draws=settings.mc_draws, chains=settings.mc_chains
        )
        batch = ensembles.sample_susy(config, settings.mc_workers)
        masses[nu] = stats.lowest_mass(batch.pooled(), stats.hard_edge_threshold(N))
        if nu == 0:
            slope = stats.fit_edge_slope(batch.pooled(), (-6.0, -2.0))
        q_rows = ensembles.sample_q_block(replace(config, N=Q_BLOCK_N, draws=Q_BLOCK_DRAWS), settings.mc_workers)
        zero_modes[nu] = sorted({int(c) for c in stats.zero_mode_counts(q_rows)})
        if nu == 0:
            q_distance = stats.q_symmetry_distance(q_rows)
            pairing = stats.q_pairing_error(q_rows)
    ok = (
        abs(slope + 0.5) <= 0.1
        and masses[2] < masses[0]
        and q_distance <= 0.05
        and pairing <= 1e-10
        and all(counts == [nu] for nu, counts in zero_modes.items())
    )
    return CriterionResult(
        8,
        "susy-hard-edge",
        ok,
        {
            "slope": round(slope, 6),
            "lowest_mass_nu0": round(masses[0], 8),
            "lowest_mass_nu2": round(masses[2], 8),
            "q_symmetry_distance": round(q_distance, 8),
            "q_pairing_error": float(f"{pairing:.3e}"),
            "q_zero_modes": {str(nu): counts for nu, counts in zero_modes.items()},
        },
    )


QUARTIC = (Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(1))


def check_metropolis_oracle(settings: Settings) -> CriterionResult:
    config = ensembles.EnsembleConfig(
        N=2,
        kind=ensembles.POTENTIAL,
        potential=QUARTIC,
        seed=settings.seed,
        draws=20000,
        chain=ChainParams(steps=5, burn_in=settings.mc_burn_in, step_size=settings.mc_step_size),
        chains=settings.mc_chains,
    )
    batch = ensembles.sample_potential_metropolis(config, settings.mc_workers)
    mc = float(np.mean(batch.pooled() ** 2))
    exact = stats.two_eigenvalue_moment(QUARTIC)
    err = abs(mc - exact) / exact
    return CriterionResult(
        9,
        "metropolis-oracle",
        err <= 0.02,
        {
            "monte_carlo": round(mc, 6),
            "quadrature": round(exact, 8),
            "relative_error": round(err, 6),
            "acceptance_rate": round(batch.acceptance_rate, 6),
        },
    )


def check_determinism(settings: Settings) -> CriterionResult:
    """Same seed, different worker counts: identical bytes."""
    config = ensembles.EnsembleConfig(N=50, kind=ensembles.GAUSSIAN, seed=settings.seed, draws=40, chains=4)
    serial = ensembles.sample_gaussian(config, workers=1).draws
    threaded = ensembles.sample_gaussian(config, workers=4).draws
    again = ensembles.sample_gaussian(config, workers=4).draws
    ok = serial.tobytes() == threaded.tobytes() == again.tobytes()
    return CriterionResult(10, "determinism", ok, {"draws": 40, "chains": 4, "identical": ok})


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------


def run_suite(suite: str, settings: Settings, golden_path: Path | None = None) -> CheckReport:
    if suite not in SUITES:
        raise InvalidArgumentError(f"unknown suite {suite!r}; expected fast or full")
    golden_path = golden_path or GOLDEN_FILE
    full = suite == "full"
    plan: list[Callable[[], CriterionResult]] = [
        lambda: check_exact_volumes(golden_path),
        lambda: check_volume_table(6 if full else 3, settings.mc_workers),
        lambda: check_disc_laplace(settings.quad_tol),
        check_gluing,
        check_super_closed_forms,
        check_super_oracle,
        lambda: check_semicircle(settings),
        lambda: check_hard_edge(settings),
    ]
    if full:
        plan.append(lambda: check_metropolis_oracle(settings))
    plan.append(lambda: check_determinism(settings))

    results = []
    for step in plan:
        started = time.perf_counter()
        result = step()
        logger.info(
            "criterion %d %s: %s (%.2fs)",
            result.id, result.name, "pass" if result.passed else "FAIL", time.perf_counter() - started,
        )
        results.append(result)
    return CheckReport(suite, results)


def report_meta(settings: Settings) -> dict:
    return {"tool": "wpvol", "version": __version__, "config": settings.resolved()}
