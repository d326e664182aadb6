"""Riemann zeta on (1, inf) and the bipotential profile G(t) = Li2(t) / (4 pi^2)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FOUR_PI_SQ = 4.0 * math.pi**2
ZETA2 = math.pi**2 / 6.0

# B_2, B_4, ..., B_20
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)


class DomainError(ValueError):
    """Argument outside the domain where a function is defined here."""


@dataclass(frozen=True)
class SeriesTolerance:
    abs_tol: float = 1e-13
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_TOL = SeriesTolerance()


def riemann_zeta(s: float, n_direct: int = 16) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin corrected partial sums.

    The partial sum runs to ``n_direct - 1``; the tail is replaced by the
    integral, the endpoint half-term and ten Bernoulli corrections. With the
    default ``n_direct`` the neglected remainder is below 1e-15 for s <= 10.
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"riemann_zeta requires s > 1, got {s}")
    N = float(n_direct)
    terms = [n ** (-s) for n in range(1, n_direct)]
    terms.append(N ** (1.0 - s) / (s - 1.0))
    terms.append(0.5 * N ** (-s))
    # rising factorial s (s+1) ... (s+2j-2) and (2j)!
    rising = s
    fact = 2.0
    power = N ** (-s - 1.0)
    for j, b2j in enumerate(_BERNOULLI_EVEN, start=1):
        terms.append(b2j / fact * rising * power)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
        power /= N * N
    return math.fsum(terms)


def _li2_series(x: np.ndarray, tol: float, max_terms: int) -> np.ndarray:
    """sum x^n / n^2 for |x| <= 1/2, ascending, with the tail bound as stop rule."""
    ax = float(np.max(np.abs(x))) if x.size else 0.0
    n_terms = 1
    if ax > 0.0:
        # tail after N terms <= ax^(N+1) / ((N+1)^2 (1 - ax))
        while n_terms < max_terms:
            tail = ax ** (n_terms + 1) / ((n_terms + 1) ** 2 * (1.0 - ax))
            if tail <= tol:
                break
            n_terms += 1
    total = np.zeros_like(x)
    comp = np.zeros_like(x)
    power = np.ones_like(x)
    for n in range(1, n_terms + 1):
        power = power * x
        # Kahan step
        y = power / (n * n) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def dilog(t, tol: SeriesTolerance = DEFAULT_TOL):
    """Real dilogarithm Li2(t) on [-1, 1].

    |t| <= 1/2 uses the power series directly; t > 1/2 the reflection
    Li2(t) + Li2(1-t) = pi^2/6 - log t log(1-t); t < -1/2 the Landen
    identity Li2(t) = -Li2(t/(t-1)) - log(1-t)^2 / 2.
    """
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    x = np.atleast_1d(arr).astype(float)
    if np.any(np.abs(x) > 1.0) or np.any(np.isnan(x)):
        raise DomainError("dilog requires -1 <= t <= 1")
    out = np.empty_like(x)
    series_tol = tol.abs_tol * 0.25

    mid = np.abs(x) <= 0.5
    if np.any(mid):
        out[mid] = _li2_series(x[mid], series_tol, tol.max_terms)

    hi = x > 0.5
    if np.any(hi):
        th = x[hi]
        one_minus = 1.0 - th
        reflected = _li2_series(one_minus, series_tol, tol.max_terms)
        logprod = np.where(one_minus > 0.0, np.log(th) * np.log(np.where(one_minus > 0.0, one_minus, 1.0)), 0.0)
        out[hi] = ZETA2 - logprod - reflected

    lo = x < -0.5
    if np.any(lo):
        tl = x[lo]
        y = tl / (tl - 1.0)  # in [1/3, 1/2)
        out[lo] = -_li2_series(y, series_tol, tol.max_terms) - 0.5 * np.log1p(-tl) ** 2

    return float(out[0]) if scalar else out.reshape(arr.shape)


def g_function(t, tol: SeriesTolerance = DEFAULT_TOL):
    """G(t) = (1/4 pi^2) sum_{n>=1} t^n / n^2 for -1 <= t <= 1 (scalar or array)."""
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0):
        raise DomainError("g_function requires -1 <= t <= 1")
    # series tolerance is applied to Li2, so scale it by 4 pi^2
    li2 = dilog(arr, SeriesTolerance(tol.abs_tol * FOUR_PI_SQ, tol.max_terms))
    if np.ndim(li2) == 0:
        return float(li2) / FOUR_PI_SQ
    return li2 / FOUR_PI_SQ


def g_derivative(t):
    """G'(t) = -log(1 - t) / (4 pi^2 t), with G'(0) = 1/(4 pi^2)."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t == 0.0, 1.0, t)
    val = np.where(t == 0.0, 1.0, -np.log1p(-safe) / safe)
    val = val / FOUR_PI_SQ
    return float(val) if val.ndim == 0 else val


def g_tail_bound(t: float, n_terms: int) -> float:
    """Bound on |G(t) - partial sum of n_terms| from the geometric majorant."""
    a = abs(t)
    if a >= 1.0:
        # zeta(2) tail: sum_{n>N} 1/n^2 < 1/N
        return 1.0 / (n_terms * FOUR_PI_SQ)
    return a ** (n_terms + 1) / ((n_terms + 1) ** 2 * (1.0 - a)) / FOUR_PI_SQ
