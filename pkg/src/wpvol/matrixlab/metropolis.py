"""Metropolis chains for log-gas eigenvalue densities.

Two targets share one sampler:

    eigen     prod_{i<j} (l_i - l_j)^2 exp(-N sum T(l_k))
    singular  prod_{i<j} (s_i^2 - s_j^2)^2 prod s_k^(2 nu + 1) exp(-N sum T(s_k^2)),  s_k >= 0

Moves update one coordinate at a time with a Gaussian proposal (reflected at 0 in
the singular case, which keeps the proposal symmetric). All weights are summed in
log space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from wpvol.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

EIGEN = "eigen"
SINGULAR = "singular"

ADAPT_EVERY = 25
TARGET_ACCEPTANCE = (0.3, 0.5)


@dataclass(frozen=True)
class ChainParams:
    """``steps`` sweeps separate consecutive recorded draws; ``burn_in`` sweeps are discarded."""

    steps: int = 10
    burn_in: int = 500
    step_size: float = 0.1

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise InvalidArgumentError(f"chain steps must be at least 1, got {self.steps}")
        if self.burn_in < 0:
            raise InvalidArgumentError(f"burn-in must be non-negative, got {self.burn_in}")
        if not self.step_size > 0:
            raise InvalidArgumentError(f"step size must be positive, got {self.step_size}")


@dataclass
class ChainResult:
    draws: np.ndarray  # (draws, N), rows ascending
    accepted: int
    proposed: int
    final_step: float

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0


class LogGas:
    def __init__(self, n: int, potential: Polynomial, mode: str = EIGEN, nu: int = 0):
        if mode not in (EIGEN, SINGULAR):
            raise InvalidArgumentError(f"unknown log-gas mode {mode!r}")
        self.n = n
        self.potential = potential
        self.mode = mode
        self.nu = nu

    def initial_state(self) -> np.ndarray:
        if self.mode == SINGULAR:
            return np.linspace(0.2, 1.0, self.n)
        if self.n == 1:
            return np.zeros(1)
        return np.linspace(-0.5, 0.5, self.n)

    def local_log_weight(self, x: float, others: np.ndarray) -> float:
        """Every factor of the log density that involves coordinate x."""
        if self.mode == SINGULAR:
            if x <= 0.0:
                return -math.inf
            e = x * x
            value = -self.n * self.potential(e) + (2 * self.nu + 1) * math.log(x)
            if others.size:
                value += 2.0 * np.log(np.abs(e - others * others)).sum()
            return float(value)
        value = -self.n * self.potential(x)
        if others.size:
            value += 2.0 * np.log(np.abs(x - others)).sum()
        return float(value)

    def log_density(self, state: np.ndarray) -> float:
        """Unnormalized log density of a full configuration."""
        total = 0.0
        for i in range(self.n):
            others = state[i + 1:]  # each pair once
            total += self.local_log_weight(float(state[i]), others)
        return total

    def observable(self, state: np.ndarray) -> np.ndarray:
        """Eigenvalues reported for a state: l itself, or E = s^2."""
        values = state * state if self.mode == SINGULAR else state
        return np.sort(values)

    def _argument(self, x):
        return x * x if self.mode == SINGULAR else x

    def _pair_row(self, x: float, i: int, state: np.ndarray) -> np.ndarray:
        """log|u(x) - u(state_j)| for every j, with 0 in slot i."""
        diff = self._argument(x) - self._argument(state)
        diff[i] = 1.0
        return np.log(np.abs(diff))

    def run(self, draws: int, params: ChainParams, rng: np.random.Generator) -> ChainResult:
        state = self.initial_state().astype(float)
        step = params.step_size
        accepted = proposed = 0
        window_acc = window_prop = 0
        out = np.empty((draws, self.n))
        total_sweeps = params.burn_in + draws * params.steps
        power = 2 * self.nu + 1

        # cached pair logs and potential values; row sums are refreshed every sweep
        pairs = np.vstack([self._pair_row(float(state[i]), i, state) for i in range(self.n)])
        rows = pairs.sum(axis=1)
        pot = np.array([float(self.potential(self._argument(float(v)))) for v in state])

        for sweep in range(total_sweeps):
            burning = sweep < params.burn_in
            for i in range(self.n):
                current = float(state[i])
                candidate = current + step * rng.standard_normal()
                if self.mode == SINGULAR:
                    candidate = abs(candidate)
                if self.mode == SINGULAR and candidate == 0.0:
                    ok = False
                else:
                    new_row = self._pair_row(candidate, i, state)
                    new_pot = float(self.potential(self._argument(candidate)))
                    delta = -self.n * (new_pot - pot[i]) + 2.0 * (new_row.sum() - rows[i])
                    if self.mode == SINGULAR:
                        delta += power * (math.log(candidate) - math.log(current))
                    ok = delta >= 0.0 or rng.random() < math.exp(delta)
                    if ok:
                        rows += new_row - pairs[i]
                        rows[i] = new_row.sum()
                        pairs[i, :] = new_row
                        pairs[:, i] = new_row
                        pot[i] = new_pot
                        state[i] = candidate
                if burning:
                    window_acc += ok
                    window_prop += 1
                else:
                    accepted += ok
                    proposed += 1
            rows = pairs.sum(axis=1)

            if burning and (sweep + 1) % ADAPT_EVERY == 0:
                rate = window_acc / window_prop
                if rate < TARGET_ACCEPTANCE[0]:
                    step *= 0.8
                elif rate > TARGET_ACCEPTANCE[1]:
                    step *= 1.25
                window_acc = window_prop = 0
            elif not burning:
                k = sweep - params.burn_in
                if (k + 1) % params.steps == 0:
                    out[k // params.steps] = self.observable(state)

        logger.debug(
            "log-gas chain N=%d mode=%s: step %.4g -> %.4g, acceptance %.3f",
            self.n, self.mode, params.step_size, step, accepted / proposed if proposed else 0.0,
        )
        return ChainResult(out, accepted, proposed, step)
