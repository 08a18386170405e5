"""Tridiagonal random-matrix models and a symmetric tridiagonal eigensolver.

Gaussian unitary class (beta = 2 Hermite model): diagonal N(0, 1),
off-diagonal chi_{2k} / sqrt(2) for k = N-1, ..., 1. Eigenvalues follow
prod |l_i - l_j|^2 exp(-sum l^2 / 2), semicircle radius 2 sqrt(N).

Complex Wishart (beta = 2 Laguerre model): lower bidiagonal B with diagonal
chi_{2(N+nu-i)} and subdiagonal chi_{2(N-1-i)}, i = 0..N-1. B B^T has the
spectrum of P^dagger P for an (N+nu) x N complex Gaussian P with E|P_ij|^2 = 2.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from wpvol.errors import InvalidArgumentError, WpvolError

SOLVERS = ("lapack", "ql")


class ConvergenceError(WpvolError):
    """Implicit QL did not converge within its iteration limit."""


def _safe_hypot(a: float, b: float) -> float:
    """sqrt(a^2 + b^2) without under/overflow."""
    absa, absb = abs(a), abs(b)
    if absa > absb:
        return absa * math.sqrt(1.0 + (absb / absa) ** 2)
    if absb == 0.0:
        return 0.0
    return absb * math.sqrt(1.0 + (absa / absb) ** 2)


def ql_implicit(diagonal, off_diagonal, tol: float = 1e-15, max_iter: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric tridiagonal matrix by QL with implicit Wilkinson shifts.

    ``off_diagonal`` has length n - 1. Returns the eigenvalues sorted ascending.
    """
    d = [float(x) for x in diagonal]
    n = len(d)
    if len(off_diagonal) != max(n - 1, 0):
        raise InvalidArgumentError(f"off-diagonal must have length {n - 1}, got {len(off_diagonal)}")
    e = [float(x) for x in off_diagonal] + [0.0]

    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= tol * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if iterations >= max_iter:
                raise ConvergenceError(f"QL failed to converge for eigenvalue {l} after {max_iter} sweeps")
            iterations += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = _safe_hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = _safe_hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # underflow: deflate and restart
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return np.sort(np.asarray(d))


def tridiagonal_eigenvalues(diagonal, off_diagonal, solver: str = "lapack") -> np.ndarray:
    """Sorted eigenvalues; ``lapack`` uses the root-free QL/QR driver, ``ql`` the pure-Python routine."""
    if solver == "ql":
        return ql_implicit(diagonal, off_diagonal)
    if solver == "lapack":
        if len(diagonal) == 1:
            return np.asarray(diagonal, dtype=float)
        return eigvalsh_tridiagonal(np.asarray(diagonal, float), np.asarray(off_diagonal, float), lapack_driver="sterf")
    raise InvalidArgumentError(f"unknown solver {solver!r}; expected one of {', '.join(SOLVERS)}")


def hermite_tridiagonal(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One draw of the beta = 2 Hermite tridiagonal model."""
    diagonal = rng.standard_normal(n)
    dof = 2.0 * np.arange(n - 1, 0, -1)
    off = np.sqrt(rng.chisquare(dof)) / math.sqrt(2.0) if n > 1 else np.empty(0)
    return diagonal, off


def laguerre_tridiagonal(n: int, nu: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """B B^T for one draw of the beta = 2 Laguerre bidiagonal model, as (diagonal, off-diagonal)."""
    a = np.sqrt(rng.chisquare(2.0 * (n + nu - np.arange(n))))
    c = np.sqrt(rng.chisquare(2.0 * np.arange(n - 1, 0, -1))) if n > 1 else np.empty(0)
    diagonal = a ** 2
    diagonal[1:] += c ** 2
    return diagonal, a[:-1] * c
