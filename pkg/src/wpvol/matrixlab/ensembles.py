"""Finite-N ensembles: configuration, samplers and batch export.

Normalizations (N -> infinity limits):

    gaussian-hermitian     T(l) = 2 l^2, semicircle (2/pi) sqrt(1 - l^2) on [-1, 1]
    polynomial-potential   prod (l_i - l_j)^2 exp(-N sum T(l_k)) for the given T
    susy-block             H = P^dagger P, P (N+nu) x N, weight exp(-N Tr T(P^dagger P));
                           T(E) = E gives Marchenko-Pastur on [0, 4]

Randomness: numpy PCG64 seeded by SeedSequence(seed); chain c draws from
SeedSequence(seed).spawn(chains)[c]. Draws are split across chains in contiguous
blocks and merged in chain order, so results do not depend on worker scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from wpvol.errors import InvalidArgumentError
from wpvol.matrixlab.metropolis import EIGEN, SINGULAR, ChainParams, LogGas
from wpvol.matrixlab.tridiagonal import SOLVERS, hermite_tridiagonal, laguerre_tridiagonal, tridiagonal_eigenvalues
from wpvol.storage import csv_text

logger = logging.getLogger(__name__)

GAUSSIAN = "gaussian-hermitian"
POTENTIAL = "polynomial-potential"
SUSY = "susy-block"
KINDS = (GAUSSIAN, POTENTIAL, SUSY)
KIND_ALIASES = {"gue": GAUSSIAN, "potential": POTENTIAL, "susy": SUSY}

SEED_MASK = (1 << 64) - 1


def parse_kind(name: str) -> str:
    kind = KIND_ALIASES.get(name, name)
    if kind not in KINDS:
        raise InvalidArgumentError(f"unknown ensemble kind {name!r}; expected one of {', '.join(KINDS)}")
    return kind


def parse_potential(text: str) -> tuple[Fraction, ...]:
    """'0,0,0,0,1' -> coefficients of T from the constant term up."""
    try:
        return tuple(Fraction(part.strip()) for part in text.split(",") if part.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgumentError(f"bad potential {text!r}: {exc}") from exc


@dataclass(frozen=True)
class EnsembleConfig:
    N: int
    kind: str = GAUSSIAN
    potential: tuple[Fraction, ...] = ()
    nu: int = 0
    seed: int = 0
    draws: int = 100
    chain: ChainParams = field(default_factory=ChainParams)
    chains: int = 1
    solver: str = "lapack"

    def __post_init__(self) -> None:
        if self.N < 1:
            raise InvalidArgumentError(f"N must be at least 1, got {self.N}")
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown ensemble kind {self.kind!r}")
        if self.draws < 1:
            raise InvalidArgumentError(f"draw count must be at least 1, got {self.draws}")
        if self.chains < 1:
            raise InvalidArgumentError(f"chain count must be at least 1, got {self.chains}")
        if self.nu < 0:
            raise InvalidArgumentError(f"index nu must be non-negative, got {self.nu}")
        if self.nu and self.kind != SUSY:
            raise InvalidArgumentError("index nu applies to susy-block ensembles only")
        if not 0 <= self.seed <= SEED_MASK:
            raise InvalidArgumentError(f"seed must fit in 64 bits, got {self.seed}")
        if self.solver not in SOLVERS:
            raise InvalidArgumentError(f"unknown solver {self.solver!r}")
        if self.kind == POTENTIAL:
            _check_confining(self.potential, even=True)
        elif self.kind == SUSY and self.potential:
            _check_confining(self.potential, even=False)

    @property
    def is_gaussian_susy(self) -> bool:
        return self.kind == SUSY and (not self.potential or _trim(self.potential) == (0, 1))

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "kind": self.kind,
            "potential": [str(c) for c in self.potential],
            "nu": self.nu,
            "seed": self.seed,
            "draws": self.draws,
            "chain": {
                "steps": self.chain.steps,
                "burn_in": self.chain.burn_in,
                "step_size": self.chain.step_size,
            },
            "chains": self.chains,
            "solver": self.solver,
        }


def _trim(coeffs: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _check_confining(coeffs: tuple[Fraction, ...], even: bool) -> None:
    """T must grow to +infinity on the sampled domain."""
    trimmed = _trim(coeffs)
    degree = len(trimmed) - 1
    if degree < 1 or trimmed[-1] <= 0 or (even and degree % 2):
        where = "the real line" if even else "E >= 0"
        raise InvalidArgumentError(
            f"potential {[str(c) for c in coeffs]} is not confining on {where}: "
            "leading coefficient must be positive" + (" with even degree" if even else "")
        )


def _polynomial(coeffs: tuple[Fraction, ...]) -> Polynomial:
    return Polynomial([float(c) for c in coeffs])


@dataclass
class SampleBatch:
    config: EnsembleConfig
    draws: np.ndarray  # (draws, N), each row ascending
    acceptance_rate: float | None = None

    @property
    def zero_modes(self) -> int:
        """Exact zero eigenvalues of P P^dagger not stored in ``draws``."""
        return self.config.nu if self.config.kind == SUSY else 0

    def pooled(self) -> np.ndarray:
        return self.draws.ravel()

    def to_json(self, meta: dict | None = None) -> dict:
        data = dict(meta or {})
        data.update(
            {
                "ensemble": self.config.to_json(),
                "acceptance_rate": self.acceptance_rate,
                "zero_modes": self.zero_modes,
                "draws": [[float(x) for x in row] for row in self.draws],
            }
        )
        return data

    def to_csv(self, comments: dict | None = None) -> str:
        header = ["draw"] + [f"l{i + 1}" for i in range(self.config.N)]
        rows = ([k] + [repr(float(x)) for x in row] for k, row in enumerate(self.draws))
        return csv_text(header, rows, comments)


def substreams(seed: int, chains: int) -> list[np.random.Generator]:
    """Independent generators, one per chain, from one 64-bit seed."""
    return [np.random.Generator(np.random.PCG64(ss)) for ss in np.random.SeedSequence(seed).spawn(chains)]


def split_draws(total: int, chains: int) -> list[int]:
    base, extra = divmod(total, chains)
    return [base + (c < extra) for c in range(chains)]


def _run_chains(
    config: EnsembleConfig,
    work: Callable[[int, int, np.random.Generator], tuple[np.ndarray, int, int]],
    workers: int,
) -> tuple[np.ndarray, int, int]:
    rngs = substreams(config.seed, config.chains)
    counts = split_draws(config.draws, config.chains)
    jobs = [(c, counts[c], rngs[c]) for c in range(config.chains) if counts[c]]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = {c: pool.submit(work, c, count, rng) for c, count, rng in jobs}
        results = {c: f.result() for c, f in futures.items()}
    ordered = [results[c] for c in sorted(results)]
    draws = np.vstack([r[0] for r in ordered])
    return draws, sum(r[1] for r in ordered), sum(r[2] for r in ordered)


def sample_gaussian(config: EnsembleConfig, workers: int = 1) -> SampleBatch:
    """Tridiagonal Hermite model scaled by 1/(2 sqrt N)."""
    if config.kind != GAUSSIAN:
        raise InvalidArgumentError(f"sample_gaussian needs kind {GAUSSIAN}, got {config.kind}")
    scale = 1.0 / (2.0 * math.sqrt(config.N))

    def work(chain: int, count: int, rng: np.random.Generator):
        out = np.empty((count, config.N))
        for k in range(count):
            diagonal, off = hermite_tridiagonal(config.N, rng)
            out[k] = tridiagonal_eigenvalues(diagonal, off, config.solver) * scale
        return out, 0, 0

    draws, _, _ = _run_chains(config, work, workers)
    logger.debug("gaussian batch N=%d draws=%d seed=%d", config.N, config.draws, config.seed)
    return SampleBatch(config, draws)


def _metropolis(config: EnsembleConfig, gas: LogGas, workers: int) -> SampleBatch:
    def work(chain: int, count: int, rng: np.random.Generator):
        result = gas.run(count, config.chain, rng)
        return result.draws, result.accepted, result.proposed

    draws, accepted, proposed = _run_chains(config, work, workers)
    rate = accepted / proposed if proposed else 0.0
    logger.debug("%s batch N=%d draws=%d acceptance=%.3f", config.kind, config.N, config.draws, rate)
    return SampleBatch(config, draws, rate)


def sample_potential_metropolis(config: EnsembleConfig, workers: int = 1) -> SampleBatch:
    if config.kind != POTENTIAL:
        raise InvalidArgumentError(f"sample_potential_metropolis needs kind {POTENTIAL}, got {config.kind}")
    gas = LogGas(config.N, _polynomial(config.potential), EIGEN)
    return _metropolis(config, gas, workers)


def sample_susy(config: EnsembleConfig, workers: int = 1) -> SampleBatch:
    """Eigenvalues of P^dagger P; Gaussian weight by the Laguerre model, otherwise by Metropolis on singular values."""
    if config.kind != SUSY:
        raise InvalidArgumentError(f"sample_susy needs kind {SUSY}, got {config.kind}")
    if not config.is_gaussian_susy:
        gas = LogGas(config.N, _polynomial(config.potential), SINGULAR, config.nu)
        return _metropolis(config, gas, workers)

    scale = 1.0 / (2.0 * config.N)

    def work(chain: int, count: int, rng: np.random.Generator):
        out = np.empty((count, config.N))
        for k in range(count):
            diagonal, off = laguerre_tridiagonal(config.N, config.nu, rng)
            values = tridiagonal_eigenvalues(diagonal, off, config.solver) * scale
            out[k] = np.maximum(values, 0.0)
        return out, 0, 0

    draws, _, _ = _run_chains(config, work, workers)
    logger.debug("susy batch N=%d nu=%d draws=%d", config.N, config.nu, config.draws)
    return SampleBatch(config, draws)


def sample(config: EnsembleConfig, workers: int = 1) -> SampleBatch:
    if config.kind == GAUSSIAN:
        return sample_gaussian(config, workers)
    if config.kind == POTENTIAL:
        return sample_potential_metropolis(config, workers)
    return sample_susy(config, workers)


def sample_q_block(config: EnsembleConfig, workers: int = 1) -> np.ndarray:
    """Eigenvalues of the dense Q = [[0, P], [P^dagger, 0]], one ascending row of 2N + nu per draw.

    P is drawn entry by entry with weight exp(-N |p|^2) and Q is diagonalized as a
    whole, so the +-mu pairing and the nu zero modes are measured rather than built in.
    Uses the same substreams as the Laguerre model but its own draws.
    """
    if config.kind != SUSY or not config.is_gaussian_susy:
        raise InvalidArgumentError("dense Q sampling needs a Gaussian susy-block configuration")
    rows, cols = config.N + config.nu, config.N
    sigma = math.sqrt(0.5 / config.N)

    def work(chain: int, count: int, rng: np.random.Generator):
        out = np.empty((count, rows + cols))
        Q = np.zeros((rows + cols, rows + cols), dtype=complex)
        for k in range(count):
            P = sigma * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))
            Q[:rows, rows:] = P
            Q[rows:, :rows] = P.conj().T
            out[k] = np.linalg.eigvalsh(Q)
        return out, 0, 0

    draws, _, _ = _run_chains(config, work, workers)
    logger.debug("dense Q batch N=%d nu=%d draws=%d", config.N, config.nu, config.draws)
    return draws
