"""Zeros of a section: Aberth-Ehrlich in the chart where each root is small,
companion-matrix fallback, and a backward-error certificate."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numba
import numpy as np

from ..geometry import ProjectivePoint
from .sampling import SectionSample, section_polynomial

log = logging.getLogger(__name__)

CERT_TOL = 1e-8
_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class RootFindingError(ArithmeticError):
    pass


@numba.njit(cache=True)
def _newton_ratio(a, z):
    """p(z)/p'(z), evaluated in the chart where the argument has modulus <= 1."""
    k = a.shape[0] - 1
    if abs(z) <= 1.0:
        p = a[k]
        dp = 0.0j
        for j in range(k - 1, -1, -1):
            dp = dp * z + p
            p = p * z + a[j]
        return p / dp
    # p(z) = z^k q(w), q(w) = sum a_{k-j} w^j, w = 1/z
    w = 1.0 / z
    q = a[0]
    dq = 0.0j
    for j in range(1, k + 1):
        dq = dq * w + q
        q = q * w + a[j]
    return z * q / (k * q - w * dq)


@numba.njit(cache=True)
def _chart_value(a, z):
    """|p(z)| if |z| <= 1, else |q(1/z)|."""
    k = a.shape[0] - 1
    if abs(z) <= 1.0:
        p = a[k]
        for j in range(k - 1, -1, -1):
            p = p * z + a[j]
        return abs(p)
    w = 1.0 / z
    q = a[0]
    for j in range(1, k + 1):
        q = q * w + a[j]
    return abs(q)


@numba.njit(cache=True)
def aberth(a, z0, max_iter, tol):
    """Gauss-Seidel Aberth-Ehrlich iteration. Returns (roots, converged, iterations)."""
    k = a.shape[0] - 1
    z = z0.copy()
    done = np.zeros(k, dtype=np.bool_)
    n_done = 0
    it = 0
    while it < max_iter and n_done < k:
        it += 1
        for i in range(k):
            if done[i]:
                continue
            N = _newton_ratio(a, z[i])
            s = 0.0j
            for j in range(k):
                if j != i:
                    s += 1.0 / (z[i] - z[j])
            corr = N / (1.0 - N * s)
            z[i] -= corr
            if abs(corr) <= tol * max(1.0, abs(z[i])):
                done[i] = True
                n_done += 1
    return z, n_done == k, it


@numba.njit(cache=True)
def newton_polish(a, z, n_steps):
    out = z.copy()
    for i in range(out.shape[0]):
        for _ in range(n_steps):
            d = _newton_ratio(a, out[i])
            out[i] -= d
            if abs(d) <= 1e-16 * max(1.0, abs(out[i])):
                break
    return out


@numba.njit(cache=True)
def backward_errors(a, z):
    k = a.shape[0] - 1
    scale = 0.0
    for j in range(k + 1):
        scale = max(scale, abs(a[j]))
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        out[i] = _chart_value(a, z[i]) / (scale * k)
    return out


def initial_guesses(k: int) -> np.ndarray:
    """Spherical Fibonacci points in the affine chart, equidistributed for omega."""
    i = np.arange(k)
    t = (i + 0.5) / k  # |z|^2/(1+|z|^2) is uniform under omega/pi
    r = np.sqrt(t / (1.0 - t))
    return r * np.exp(2j * np.pi * (i / _GOLDEN + 0.1))


@dataclass(frozen=True)
class ZeroSet:
    k: int
    h0: np.ndarray
    h1: np.ndarray
    backward_error: np.ndarray
    method: str

    def __post_init__(self) -> None:
        if self.h0.shape != (self.k,):
            raise ValueError(f"expected {self.k} zeros, got {self.h0.shape[0]}")

    @property
    def points(self) -> list[ProjectivePoint]:
        return [ProjectivePoint(complex(a), complex(b)) for a, b in zip(self.h0, self.h1)]

    def __len__(self) -> int:
        return self.k


def _to_homogeneous(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    inside = np.abs(z) <= 1.0
    zs = np.where(inside, z, 1.0)
    ws = np.where(inside, 1.0, 1.0 / np.where(inside, 1.0, z))
    h0 = np.where(inside, zs, 1.0 + 0j)
    h1 = np.where(inside, 1.0 + 0j, ws)
    n = np.sqrt(np.abs(h0) ** 2 + np.abs(h1) ** 2)
    return h0 / n, h1 / n


def polynomial_roots(a: np.ndarray, max_iter: int = 100, tol: float = 1e-14) -> tuple[np.ndarray, str]:
    """All roots of sum a_j z^j (ascending), certified; raises RootFindingError."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    k = a.shape[0] - 1
    if k < 1:
        raise RootFindingError("degree must be >= 1")
    if abs(a[0]) < 1e-300 and abs(a[k]) < 1e-300:
        raise RootFindingError("leading and trailing coefficients both vanish")
    if k == 1:
        z = np.array([-a[0] / a[1]])
        return z, "linear"
    z, ok, _ = aberth(a, initial_guesses(k).astype(np.complex128), max_iter, tol)
    method = "aberth"
    if ok:
        z = newton_polish(a, z, 2)
    # a stalled iteration is still accepted if the certificate holds
    if not np.all(np.isfinite(z)) or np.max(backward_errors(a, z)) > CERT_TOL:
        log.info("aberth failed for degree %d, using companion matrix", k)
        z = newton_polish(a, np.roots(a[::-1]).astype(np.complex128), 5)
        method = "companion"
    be = backward_errors(a, z)
    if not np.all(np.isfinite(z)) or np.max(be) > CERT_TOL:
        raise RootFindingError(f"backward error {np.max(be):.2e} above {CERT_TOL}")
    return z, method


def zeros_of_section(s: SectionSample) -> ZeroSet:
    a = section_polynomial(s)
    z, method = polynomial_roots(a)
    h0, h1 = _to_homogeneous(z)
    return ZeroSet(s.k, h0, h1, backward_errors(np.ascontiguousarray(a), z), method)
