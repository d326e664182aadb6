"""Exchange of G with a perturbed Gaussian integral.

For alpha a polynomial in (u, ubar) without constant or linear part,

    int G(e^{-|u|^2} [1 + alpha(u)/k]) F(u) dnu
        = 1/(4 pi^2) sum_n n^-2 int e^{-n|u|^2} [1 + n alpha(u)/k] F(u) dnu + small,

dnu Lebesgue measure on C^m. gint_identity_residual measures the gap.
Callables take u as a complex array of shape (npts, m) and return (npts,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from ..specfun import DomainError, FOUR_PI_SQ, g_function

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GintSides:
    lhs: float
    rhs: float
    tail: float
    n_terms: int

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def quartic_alpha(u: np.ndarray) -> np.ndarray:
    """alpha(u) = |u|^4 / 2, the CP^1 curvature term R(u, ubar, u, ubar)/4."""
    return 0.5 * np.sum(np.abs(u) ** 2, axis=-1) ** 2


def zero_alpha(u: np.ndarray) -> np.ndarray:
    return np.zeros(u.shape[0])


def unit_field(u: np.ndarray) -> np.ndarray:
    return np.ones(u.shape[0])


def norm_sq_field(u: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(u) ** 2, axis=-1)


def _disk_rule(r_edges: np.ndarray, n_gl: int, n_angle: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar rule on C: GL panels in r between r_edges, trapezoid in angle."""
    x, w = np.polynomial.legendre.leggauss(n_gl)
    a, b = r_edges[:-1, None], r_edges[1:, None]
    r = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    wr = (0.5 * (b - a) * w).ravel() * r
    th = 2.0 * np.pi * np.arange(n_angle) / n_angle
    pts = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    wts = np.repeat(wr, n_angle) * (2.0 * np.pi / n_angle)
    return pts, wts


@lru_cache(maxsize=8)
def product_rule(m: int, r_edges: tuple, n_gl: int, n_angle: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor product of m disk rules; points (npts, m), weights (npts,)."""
    pts1, w1 = _disk_rule(np.asarray(r_edges), n_gl, n_angle)
    if m == 1:
        return pts1[:, None], w1
    if m == 2:
        P0, P1 = np.meshgrid(pts1, pts1, indexing="ij")
        W = np.outer(w1, w1)
        return np.stack([P0.ravel(), P1.ravel()], axis=1), W.ravel()
    raise ValueError("m must be 1 or 2")


def _graded_edges(r_max: float, levels: int) -> tuple:
    # geometric refinement to 0, where G(e^{-|u|^2}) has a log-singular derivative
    return tuple([0.0] + [r_max * 2.0 ** (-j) for j in range(levels, -1, -1)])


def check_precondition(alpha: Field, k: int, m: int, r_max: float = 12.0, n: int = 4000) -> None:
    """Reject unless 1 + |alpha(u)|/k <= e^{|u|^2/2} on a grid of |u| <= r_max."""
    r = np.linspace(0.0, r_max, n)
    th = np.linspace(0.0, 2 * np.pi, 17)[:-1]
    for t in th:
        z = r * np.exp(1j * t)
        if m == 1:
            u = z[:, None]
        else:
            u = np.stack([z * math.cos(0.7), z * math.sin(0.7)], axis=1)
        lhs = 1.0 + np.abs(alpha(u)) / k
        rhs = np.exp(0.5 * r * r)
        if np.any(lhs > rhs * (1 + 1e-12)):
            bad = r[np.argmax(lhs > rhs)]
            raise DomainError(f"1 + |alpha|/k exceeds e^(|u|^2/2) at |u| = {bad:.3g} for k = {k}")


def gint_sides(alpha: Field, F: Field, k: int, m: int = 1, n_terms: int | None = None) -> GintSides:
    if k < 1:
        raise DomainError("k must be positive")
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    check_precondition(alpha, k, m)

    if m == 1:
        pts, w = product_rule(1, _graded_edges(9.0, 40), 20, 32)
    else:
        pts, w = product_rule(2, _graded_edges(7.0, 14), 10, 12)
    t = np.exp(-np.sum(np.abs(pts) ** 2, axis=1)) * (1.0 + alpha(pts) / k)
    lhs = float(np.dot(g_function(t) * F(pts), w))

    # each n-term in scaled variables v = sqrt(n) u: a plain Gaussian integral
    if m == 1:
        vp, vw = product_rule(1, (0.0, 3.0, 7.0), 40, 32)
    else:
        vp, vw = product_rule(2, (0.0, 3.0, 7.0), 12, 8)
    gauss = np.exp(-np.sum(np.abs(vp) ** 2, axis=1)) * vw
    N = n_terms or (20000 if m == 1 else 400)
    terms = np.empty(N)
    for n in range(1, N + 1):
        s = math.sqrt(n)
        u = vp / s
        integrand = (1.0 + n * alpha(u) / k) * F(u)
        terms[n - 1] = float(np.dot(integrand, gauss)) / n**m / (n * n)
    # I_n n^m is nearly constant in n; sum the tail as sum_{n>N} n^-(m+2)
    last = terms[-1] * N**2 * N**m
    tail = last / ((m + 1) * (N + 0.5) ** (m + 1))
    rhs = (math.fsum(terms[::-1]) + tail) / FOUR_PI_SQ
    return GintSides(lhs, float(rhs), float(tail) / FOUR_PI_SQ, N)


def gint_identity_residual(alpha: Field, F: Field, k: int, m: int = 1) -> float:
    """|LHS - RHS| of the series exchange; O(k^-3/2) or better."""
    return gint_sides(alpha, F, k, m).residual
