"""Gaussian (Wick) moments, the curvature contraction they produce, and the
multinomial expansion of (1 + C_2 x^2 + ... + C_p x^p)^n."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from ..geometry import CurvatureData


def _check_indices(m: int, idx: Sequence[int]) -> None:
    for i in idx:
        if not 1 <= i <= m:
            raise ValueError(f"index {i} outside 1..{m}")


def wick_moment(m: int, up_indices: Sequence[int], bar_indices: Sequence[int]) -> int:
    """E[prod v^j prod conj(v)^l] for v standard complex Gaussian in C^m.

    Equals the permanent of the 0/1 match matrix, which is the product of
    multiplicity factorials when the multisets agree and 0 otherwise.
    """
    _check_indices(m, up_indices)
    _check_indices(m, bar_indices)
    up, bar = Counter(up_indices), Counter(bar_indices)
    if up != bar:
        return 0
    return math.prod(math.factorial(c) for c in up.values())


def wick_moment_permanent(up_indices: Sequence[int], bar_indices: Sequence[int]) -> int:
    """Same quantity by enumerating every bijection up -> bar."""
    if len(up_indices) != len(bar_indices):
        return 0
    total = 0
    for perm in itertools.permutations(bar_indices):
        if all(a == b for a, b in zip(up_indices, perm)):
            total += 1
    return total


def curvature_contraction(curv: CurvatureData) -> float:
    """sum R[j,lbar,p,qbar] E[v^j v^p conj(v^l) conj(v^q)], via wick_moment."""
    m = curv.m
    total = 0.0
    for j, l, p, q in itertools.product(range(m), repeat=4):
        w = wick_moment(m, (j + 1, p + 1), (l + 1, q + 1))
        if w:
            total += w * curv.tensor[j, l, p, q]
    return total


def scalar_curvature_from_tensor(curv: CurvatureData) -> float:
    return float(sum(curv.tensor[j, j, p, p] for j in range(curv.m) for p in range(curv.m)))


# --- Monte Carlo Gaussian moments ---------------------------------------------


def moment_exponents(m: int, max_degree: int) -> np.ndarray:
    """All (a_1..a_m, b_1..b_m) with sum <= max_degree, as an int array.

    a_j (b_j) is the multiplicity of index j in the up (bar) multiset.
    """
    rows = [e for e in itertools.product(range(max_degree + 1), repeat=2 * m) if sum(e) <= max_degree]
    return np.array(rows, dtype=np.int64)


def exponents_to_indices(row: Sequence[int], m: int) -> tuple[list[int], list[int]]:
    up = [j + 1 for j in range(m) for _ in range(row[j])]
    bar = [j + 1 for j in range(m) for _ in range(row[m + j])]
    return up, bar


@numba.njit(cache=True)
def _moment_sums(v, expo, max_degree):
    n, m = v.shape
    n_mom = expo.shape[0]
    d1 = max_degree + 1
    # flat table offsets: entry (j, a, b) holds v_j^a conj(v_j)^b
    off = np.empty((n_mom, m), dtype=np.int64)
    for t in range(n_mom):
        for j in range(m):
            off[t, j] = (j * d1 + expo[t, j]) * d1 + expo[t, m + j]
    s = np.zeros(n_mom, dtype=np.complex128)
    s2r = np.zeros(n_mom)
    s2i = np.zeros(n_mom)
    pw = np.empty(d1, dtype=np.complex128)
    tab = np.empty(m * d1 * d1, dtype=np.complex128)
    for i in range(n):
        for j in range(m):
            pw[0] = 1.0
            for a in range(1, d1):
                pw[a] = pw[a - 1] * v[i, j]
            for a in range(d1):
                for b in range(d1 - a):
                    tab[(j * d1 + a) * d1 + b] = pw[a] * np.conj(pw[b])
        for t in range(n_mom):
            x = tab[off[t, 0]]
            for j in range(1, m):
                x *= tab[off[t, j]]
            s[t] += x
            s2r[t] += x.real * x.real
            s2i[t] += x.imag * x.imag
    return s, s2r, s2i


@dataclass(frozen=True)
class MomentEstimates:
    exponents: np.ndarray
    mean: np.ndarray
    stderr_real: np.ndarray
    stderr_imag: np.ndarray
    n_samples: int


def mc_gaussian_moments(m: int, max_degree: int = 8, n_samples: int = 1_000_000, seed: int = 0) -> MomentEstimates:
    """Sample means of every moment of degree <= max_degree, with standard errors."""
    rng = np.random.Generator(np.random.Philox(seed))
    v = (rng.standard_normal((n_samples, m)) + 1j * rng.standard_normal((n_samples, m))) / math.sqrt(2.0)
    expo = moment_exponents(m, max_degree)
    s, s2r, s2i = _moment_sums(np.ascontiguousarray(v), expo, max_degree)
    mean = s / n_samples
    var_r = np.maximum(s2r / n_samples - mean.real**2, 0.0) * n_samples / (n_samples - 1)
    var_i = np.maximum(s2i / n_samples - mean.imag**2, 0.0) * n_samples / (n_samples - 1)
    return MomentEstimates(expo, mean, np.sqrt(var_r / n_samples), np.sqrt(var_i / n_samples), n_samples)


# --- multinomial expansion -------------------------------------------------------


def partitions_by_parts(j: int, p: int):
    """Count vectors r = (r_2, ..., r_p) with sum lambda r_lambda = j."""

    def rec(rem: int, lam: int):
        if lam < 2:
            if rem == 0:
                yield ()
            return
        for c in range(rem // lam + 1):
            for rest in rec(rem - c * lam, lam - 1):
                yield rest + (c,)

    yield from rec(j, p)


def multinomial_expand(C: Sequence, n: int, j: int):
    """Coefficient B_pj of x^j in (1 + sum_{l=2}^p C_l x^l)^n; C = [C_2, ..., C_p].

    Sum over r in P(j) of n(n-1)...(n-|r|+1)/(r_2! ... r_p!) prod C_l^r_l.
    Arithmetic stays in the type of C (exact for int or Fraction entries).
    """
    p = len(C) + 1
    if p < 2:
        raise ValueError("need at least C_2")
    if n < 0 or j < 2:
        raise ValueError("require n >= 0 and j >= 2")
    total = 0
    for r in partitions_by_parts(j, p):
        size = sum(r)
        if size > n:
            continue
        coef = math.perm(n, size) // math.prod(math.factorial(c) for c in r)
        term = coef
        for c_l, r_l in zip(C, r):
            term = term * c_l**r_l
        total = total + term
    return total


def power_coefficients(C: Sequence, n: int) -> list:
    """All coefficients of (1 + sum C_l x^l)^n by repeated multiplication."""
    base = [1, 0] + list(C)
    out = [1]
    for _ in range(n):
        new = [0] * (len(out) + len(base) - 1)
        for a, x in enumerate(out):
            if x == 0:
                continue
            for b, y in enumerate(base):
                new[a + b] = new[a + b] + x * y
        out = new
    return out
