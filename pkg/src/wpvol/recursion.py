"""Topological recursion on curves x = z^2 with odd y.

Writing W_{g,n} for the coefficient function of omega_{g,n} and
W_{0,2}(a, b) = 1/(a - b)^2, the recursion is

    W_{g,n}(z1, J) = Res_{s=0}  1/(z1^2 - s^2) * 1/(4 y(s)) *
        [ W_{g-1,n+1}(s, -s, J) + sum' W_{g1}(s, I) W_{g2}(-s, J minus I) ]

with the bracket evaluated as functions at -s.  Residues are read off as the
coefficient of s^-1 after expanding

    1/(z1^2 - s^2)   = sum_m s^(2m) / z1^(2m+2)
    1/(4 y(s))       = sum_p kappa_p s^p
    W_{0,2}(s, zj) + W_{0,2}(-s, zj) = 2 sum_l (2l+1) s^(2l) / zj^(2l+2)

so only exact bookkeeping is involved.  The bracket is held as a map
``(e, k_J) -> coefficient`` of ``s^(-2e) prod_j zj^-(2 k_j + 2)``.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from wpvol import storage
from wpvol.curves import SpectralCurve
from wpvol.errors import InvalidArgumentError, MemoFileError, TruncationOverflowError
from wpvol.models import Correlator, CorrelatorKey, MultiIndex, is_stable
from wpvol.ring import ExactScalar
from wpvol.series import TruncSeries, series_reciprocal

logger = logging.getLogger(__name__)

MEMO_VERSION = 1

Bracket = dict[tuple[int, MultiIndex], ExactScalar]


@dataclass(frozen=True)
class KernelExpansion:
    """Exact expansion of 1/(4 y(z)) through z^max_order."""

    curve: str
    inverse_4y: TruncSeries

    def kappa(self, p: int) -> ExactScalar:
        return self.inverse_4y.coefficient(p)

    @property
    def valuation(self) -> int:
        return self.inverse_4y.valuation()


def _reciprocal_4y(curve: SpectralCurve) -> TruncSeries:
    return series_reciprocal(curve.y_series.scale(4))


def _overflow(curve: SpectralCurve, inverse: TruncSeries, max_order: int) -> TruncationOverflowError:
    # each extra order of y buys one extra order of 1/(4y)
    required = max(curve.order + (max_order + 1 - inverse.order), 3)
    return TruncationOverflowError(required, curve.order, what=f"curve {curve.curve_id}")


def top_kernel_index(g: int, n: int) -> int:
    """Highest p with kappa_p read by the residues at (g, n).

    Bracket entries s^(-2e) have e <= 3g - 3 + n, and the residue pairs them
    with kappa_(2e - 1) at most.
    """
    return 2 * (3 * g - 3 + n) - 1


def required_order(curve: SpectralCurve, g: int, n: int) -> int:
    """Smallest truncation order of ``curve`` that carries omega_{g,n} through."""
    inverse = _reciprocal_4y(curve)
    return max(curve.order + (top_kernel_index(g, n) + 1 - inverse.order), 3)


def kernel_coefficients(curve: SpectralCurve, max_order: int) -> KernelExpansion:
    """1/(4y(z)) through z^max_order, or an error naming the curve order required."""
    inverse = _reciprocal_4y(curve)
    if max_order >= inverse.order:
        raise _overflow(curve, inverse, max_order)
    return KernelExpansion(curve.curve_id, inverse.truncate(max_order + 1))


def _add(table: dict, key, value: ExactScalar) -> None:
    current = table.get(key)
    table[key] = value if current is None else current + value


class RecursionEngine:
    """Memoized correlators omega_{g,n} for one spectral curve.

    One writer at a time may insert into the memo; completed entries are
    never mutated, so concurrent readers are safe.
    """

    def __init__(self, curve: SpectralCurve):
        self.curve = curve
        self._inverse = _reciprocal_4y(curve)
        if self._inverse.valuation() < -1:
            raise InvalidArgumentError(
                f"curve {curve.curve_id}: kernel pole of order {-self._inverse.valuation()} is not supported"
            )
        self._memo: dict[tuple[int, int], Correlator] = {}
        self._write_lock = threading.Lock()

    @property
    def curve_id(self) -> str:
        return self.curve.curve_id

    def kernel(self, max_order: int) -> KernelExpansion:
        if max_order >= self._inverse.order:
            raise _overflow(self.curve, self._inverse, max_order)
        return KernelExpansion(self.curve_id, self._inverse.truncate(max_order + 1))

    def _kappa(self, p: int) -> ExactScalar:
        if p >= self._inverse.order:
            raise _overflow(self.curve, self._inverse, p)
        return self._inverse.coefficient(p)

    # --- memo ---

    def cached(self) -> list[Correlator]:
        return [self._memo[k] for k in sorted(self._memo)]

    def clear(self) -> None:
        with self._write_lock:
            self._memo.clear()

    def save(self, path: Path) -> Path:
        data = {
            "version": MEMO_VERSION,
            "curve": self.curve_id,
            "entries": [w.to_json() for w in self.cached()],
        }
        return storage.write_json(path, data)

    def load(self, path: Path) -> int:
        """Load a memo file written by :meth:`save`; returns the number of entries."""
        if not path.exists():
            raise MemoFileError(f"memo file not found: {path}")
        data = storage.load_json(path, fallback=None)
        if not isinstance(data, dict):
            raise MemoFileError(f"memo file is corrupt: {path}")
        if data.get("version") != MEMO_VERSION:
            raise MemoFileError(f"memo file version {data.get('version')!r} != {MEMO_VERSION}")
        if data.get("curve") != self.curve_id:
            raise MemoFileError(f"memo file is for curve {data.get('curve')!r}, not {self.curve_id!r}")
        try:
            loaded = [Correlator.from_json(e, self.curve_id) for e in data["entries"]]
        except (KeyError, TypeError, ValueError) as e:
            raise MemoFileError(f"memo file is corrupt: {path}: {e}") from e
        with self._write_lock:
            for w in loaded:
                self._memo[(w.key.g, w.key.n)] = w
        logger.debug("loaded %d correlators for %s from %s", len(loaded), self.curve_id, path)
        return len(loaded)

    # --- recursion ---

    def compute_correlator(self, g: int, n: int) -> Correlator:
        key = CorrelatorKey(g, n, self.curve_id)
        hit = self._memo.get((g, n))
        if hit is not None:
            return hit
        top = top_kernel_index(g, n)
        if top >= self._inverse.order:
            raise _overflow(self.curve, self._inverse, top)

        started = time.perf_counter()
        bracket = self._bracket(g, n)
        terms = self._residue(bracket, n)
        result = Correlator(key, terms)
        with self._write_lock:
            result = self._memo.setdefault((g, n), result)
        logger.debug(
            "omega_(%d,%d) on %s: %d terms in %.3fs",
            g, n, self.curve_id, len(terms), time.perf_counter() - started,
        )
        return result

    def _bracket(self, g: int, n: int) -> Bracket:
        legs = n - 1
        bracket: Bracket = {}

        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                # W_{0,2}(s, -s) = 1/(4 s^2)
                _add(bracket, (1, ()), ExactScalar.rational(Fraction(1, 4)))
            else:
                inner = self.compute_correlator(g - 1, n + 1)
                for ks, c in inner.expanded().items():
                    _add(bracket, (ks[0] + ks[1] + 2, ks[2:]), c)

        e_min = (self._inverse.valuation() + 1) // 2
        for mask in range(1 << legs):
            first = [j for j in range(legs) if mask >> j & 1]
            second = [j for j in range(legs) if not mask >> j & 1]
            for g1 in range(g + 1):
                g2 = g - g1
                n1, n2 = 1 + len(first), 1 + len(second)
                if (g1, n1) == (0, 1) or (g2, n2) == (0, 1):
                    continue
                pair1, pair2 = (g1, n1) == (0, 2), (g2, n2) == (0, 2)
                if pair1 and pair2:
                    # (0,3): W_{0,2}(s, zi) W_{0,2}(-s, zj); higher terms carry s^(>0) and
                    # cannot reach s^-1 for kernels with valuation >= -1
                    ks = [0] * legs
                    _add(bracket, (0, tuple(ks)), ExactScalar.one())
                elif pair1:
                    self._pair_terms(bracket, g2, first[0], second, legs, e_min)
                elif pair2:
                    continue  # folded into the pair1 ordering
                else:
                    self._product_terms(bracket, (g1, first), (g2, second), legs)
        return bracket

    def _pair_terms(self, bracket: Bracket, h: int, j: int, rest: list[int], legs: int, e_min: int) -> None:
        """W_h(s, rest) * [W_{0,2}(s, zj) + W_{0,2}(-s, zj)]."""
        w = self.compute_correlator(h, 1 + len(rest))
        for ks, c in w.expanded().items():
            a = ks[0]
            base = [0] * legs
            for pos, k in zip(rest, ks[1:]):
                base[pos] = k
            for l in range(a + 1 - e_min + 1):
                base[j] = l
                _add(bracket, (a + 1 - l, tuple(base)), c * (2 * (2 * l + 1)))

    def _product_terms(self, bracket: Bracket, left: tuple[int, list[int]], right: tuple[int, list[int]], legs: int) -> None:
        g1, first = left
        g2, second = right
        w1 = self.compute_correlator(g1, 1 + len(first)).expanded()
        w2 = self.compute_correlator(g2, 1 + len(second)).expanded()
        for ks1, c1 in w1.items():
            base = [0] * legs
            for pos, k in zip(first, ks1[1:]):
                base[pos] = k
            for ks2, c2 in w2.items():
                for pos, k in zip(second, ks2[1:]):
                    base[pos] = k
                _add(bracket, (ks1[0] + ks2[0] + 2, tuple(base)), c1 * c2)

    def _residue(self, bracket: Bracket, n: int) -> dict[MultiIndex, ExactScalar]:
        p_min = self._inverse.valuation()
        full: dict[MultiIndex, ExactScalar] = {}
        for (e, rest), b in bracket.items():
            if not b:
                continue
            m = 0
            while 2 * e - 2 * m - 1 >= p_min:
                kappa = self._kappa(2 * e - 2 * m - 1)
                if kappa:
                    _add(full, (m,) + rest, kappa * b)
                m += 1

        terms: dict[MultiIndex, ExactScalar] = {}
        for ks, c in full.items():
            if not c:
                continue
            canonical = tuple(sorted(ks))
            seen = terms.get(canonical)
            if seen is None:
                terms[canonical] = c
            elif seen != c:
                raise ArithmeticError(f"correlator lost leg symmetry at {canonical}")
        return dict(sorted(terms.items()))

    # --- scheduling ---

    def dependencies(self, g: int, n: int) -> set[tuple[int, int]]:
        """Every stable (g', n') that omega_{g,n} reads, itself included."""
        seen: set[tuple[int, int]] = set()
        stack = [(g, n)]
        while stack:
            gn = stack.pop()
            if gn in seen or not is_stable(*gn):
                continue
            seen.add(gn)
            h, m = gn
            if h >= 1:
                stack.append((h - 1, m + 1))
            for size in range(m):
                for h1 in range(h + 1):
                    stack.append((h1, 1 + size))
        return seen

    def compute_many(self, targets: Iterable[tuple[int, int]], workers: int = 1) -> list[Correlator]:
        """Compute several correlators, level by level in 2g - 2 + n.

        Within a level entries are independent; with ``workers > 1`` they are
        computed concurrently.  Results equal the serial run exactly.
        """
        targets = list(targets)
        for g, n in targets:
            CorrelatorKey(g, n, self.curve_id)
        needed: set[tuple[int, int]] = set()
        for g, n in targets:
            needed |= self.dependencies(g, n)
        levels: dict[int, list[tuple[int, int]]] = {}
        for g, n in sorted(needed):
            levels.setdefault(2 * g - 2 + n, []).append((g, n))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for level in sorted(levels):
                    list(pool.map(lambda gn: self.compute_correlator(*gn), levels[level]))
        else:
            for level in sorted(levels):
                for gn in levels[level]:
                    self.compute_correlator(*gn)
        return [self._memo[gn] for gn in targets]


def residue_oracle(curve: SpectralCurve, g: int, n: int) -> dict[MultiIndex, ExactScalar]:
    """Low-order correlators written out by hand in terms of the kernel alone.

    Independent of :class:`RecursionEngine`; used to confirm golden values.

        omega_{0,3}:  c(0,0,0)   = 2 kappa_{-1}
        omega_{1,1}:  c(m)       = kappa_{1-2m} / 4
        omega_{0,4}:  c(0,0,0,0) = 6 C kappa_1,  c(0,0,0,1) = 6 C kappa_{-1},  C = 2 kappa_{-1}
    """
    kernel = kernel_coefficients(curve, 1)
    k_m1, k_1 = kernel.kappa(-1), kernel.kappa(1)
    if (g, n) == (0, 3):
        raw = {(0, 0, 0): k_m1 * 2}
    elif (g, n) == (1, 1):
        raw = {(0,): k_1 * ExactScalar.rational("1/4"), (1,): k_m1 * ExactScalar.rational("1/4")}
    elif (g, n) == (0, 4):
        c03 = k_m1 * 2
        raw = {(0, 0, 0, 0): c03 * k_1 * 6, (0, 0, 0, 1): c03 * k_m1 * 6}
    else:
        raise InvalidArgumentError(f"no hand-computed oracle for (g, n) = ({g}, {n})")
    return {ks: c for ks, c in raw.items() if c}


def intersection_numbers(w: Correlator) -> dict[MultiIndex, ExactScalar]:
    """Top-degree coefficients divided by prod (2k_i + 1)!!.

    On the Airy curve with slope 1/2 these are the psi-class intersection
    numbers, e.g. <tau_0^3> = 1 and <tau_1> = 1/24.
    """
    out = {}
    for ks, c in w.top_degree_part().items():
        denom = 1
        for k in ks:
            for odd in range(1, 2 * k + 2, 2):
                denom *= odd
        out[ks] = c * ExactScalar.rational(1) / denom
    return out
