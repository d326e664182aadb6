"""Exact variance of a linear statistic from the bipotential formula

    Var (Z_k, psi) = int_{M x M} Q_k(z, w) f(z) f(w) Omega(z) Omega(w).

The inner integral over w is taken in geodesic polar coordinates (d, theta)
about z, where Q_k depends on d only and Omega = sin(2d)/2 dd dtheta. The
radial range splits at the edge of the scaled ball |u| <= b sqrt(log k)
(u = sqrt(k) tan d): inside, Gauss-Legendre panels refine geometrically
towards d = 0 where Q_k has a log-singular derivative; outside, a few
uniform panels take the far field, which is O(k^-(b^2 - 1)).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Optional

import numpy as np

from ..geometry import SphereQuadrature, TestForm, integrate, sphere_quadrature
from ..kernels import normalized_kernel_arrays, q_of_distance
from ..specfun import DomainError, FOUR_PI_SQ, g_function

Route = Literal["mc", "exact", "asymptotic"]


class QuadratureError(ArithmeticError):
    """Node-doubling difference exceeded the tolerance."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class QuadratureSpec:
    outer_nodes: int = 32
    inner_radial: int = 16
    inner_angular: int = 48
    cutoff_b: float = 2.0
    near_levels: int = 10
    far_panels: int = 6
    rel_tol: float = 1e-6
    m: int = 1

    def __post_init__(self) -> None:
        if self.cutoff_b**2 < self.m + 3 - 1e-12:
            raise ValueError(f"cutoff_b^2 = {self.cutoff_b**2} < m + 3 = {self.m + 3}")
        for name in ("outer_nodes", "inner_radial", "inner_angular", "near_levels", "far_panels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")

    def halved(self) -> "QuadratureSpec":
        return QuadratureSpec(
            outer_nodes=max(self.outer_nodes // 2, 4),
            inner_radial=max(self.inner_radial // 2, 4),
            inner_angular=max(self.inner_angular // 2, 8),
            cutoff_b=self.cutoff_b,
            near_levels=self.near_levels,
            far_panels=self.far_panels,
            rel_tol=self.rel_tol,
            m=self.m,
        )

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class VarianceResult:
    value: float
    route: Route
    k: int
    testform: str
    error_estimate: float
    params: dict = field(default_factory=dict)
    flagged: bool = False

    def __post_init__(self) -> None:
        if self.route in ("mc", "exact") and self.value < -abs(self.error_estimate) - 1e-300:
            raise ValueError(f"negative {self.route} variance {self.value}")
        if self.route == "asymptotic" and self.value < 0:
            self.flagged = True

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "route": self.route,
            "testform": self.testform,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "params": self.params,
            "flagged": self.flagged,
        }


def near_field_radius(k: int, b: float) -> float:
    """Geodesic radius of the scaled ball |u| <= b sqrt(log k).

    log k is floored at 1 so that the ball is not empty at k = 1, 2.
    """
    U = b * math.sqrt(max(math.log(k), 1.0))
    return math.atan(U / math.sqrt(k))


def inner_radial_rule(k: int, spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Radial nodes d and weights Q_k(d) sin(2d)/2 for the inner integral."""
    x, w = np.polynomial.legendre.leggauss(spec.inner_radial)
    d_c = near_field_radius(k, spec.cutoff_b)
    edges = [0.0] + [d_c * 2.0 ** (-j) for j in range(spec.near_levels, -1, -1)]
    far = np.linspace(d_c, math.pi / 2, spec.far_panels + 1)
    edges = np.array(edges + list(far[1:]))
    a, b = edges[:-1, None], edges[1:, None]
    d = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    wd = (0.5 * (b - a) * w).ravel()
    return d, wd * q_of_distance(d, k) * 0.5 * np.sin(2.0 * d)


def inner_integrals(tf: TestForm, k: int, h0: np.ndarray, h1: np.ndarray, spec: QuadratureSpec, chunk: int = 64):
    """I_k(z) = int Q_k(z, w) f(w) Omega(w) at each outer point z = [h0 : h1]."""
    d, wr = inner_radial_rule(k, spec)
    nt = spec.inner_angular
    theta = 2.0 * np.pi * np.arange(nt) / nt
    # local unit vectors (sin d e^{i theta}, cos d) in the chart centred at z
    E = (np.sin(d)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    C = np.repeat(np.cos(d), nt)
    W = np.repeat(wr, nt) * (2.0 * np.pi / nt)
    out = np.empty(h0.shape[0])
    for s in range(0, h0.shape[0], chunk):
        a0 = h0[s : s + chunk, None]
        a1 = h1[s : s + chunk, None]
        # U_z = [[conj h1, h0], [-conj h0, h1]] applied to (E, C)
        g0 = np.conj(a1) * E + a0 * C
        g1 = -np.conj(a0) * E + a1 * C
        out[s : s + chunk] = tf.f(g0, g1) @ W
    return out


def _double_integral(tf: TestForm, k: int, spec: QuadratureSpec) -> float:
    quad = sphere_quadrature(spec.outer_nodes, 2 * spec.outer_nodes)
    fz = tf.f(quad.h0, quad.h1)
    mask = fz != 0.0
    if not np.any(mask):
        return 0.0
    inner = inner_integrals(tf, k, quad.h0[mask], quad.h1[mask], spec)
    # fixed-order reduction (pairwise sum in numpy) keeps runs bit-identical
    return float(np.sum(fz[mask] * quad.weights[mask] * inner))


def far_field_bound(k: int, spec: QuadratureSpec, f_l1: float) -> float:
    """Bound on the far-field part: sup Q_k there times ||f||_1^2.

    Beyond the near ball P_k^2 <= t = cos^{2k} d_c and G(t) <= t zeta(2)/(4 pi^2).
    """
    d_c = near_field_radius(k, spec.cutoff_b)
    t = math.cos(d_c) ** (2 * k)
    return t * (math.pi**2 / 6) / FOUR_PI_SQ * f_l1 * f_l1


def exact_variance(tf: TestForm, k: int, spec: QuadratureSpec | None = None, check: bool = True) -> VarianceResult:
    """Variance of (Z_k, psi) from the bipotential double integral.

    ``error_estimate`` is the difference to a run with every node count
    halved. With ``check`` a difference above 10 * rel_tol * |value| raises
    QuadratureError carrying the diagnostics.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    spec = spec or QuadratureSpec()
    value = _double_integral(tf, k, spec)
    coarse = _double_integral(tf, k, spec.halved())
    err = abs(value - coarse)
    quad = sphere_quadrature(spec.outer_nodes, 2 * spec.outer_nodes)
    f_l1 = quad.integrate(np.abs(tf.f(quad.h0, quad.h1)))
    bound = far_field_bound(k, spec, f_l1)
    params = spec.as_dict() | {"coarse_value": coarse, "far_field_bound": bound}
    if check and err > 10.0 * spec.rel_tol * abs(value) + 1e-15:
        raise QuadratureError(
            f"exact_variance not converged for {tf.name}, k={k}: doubling difference {err:.3e}",
            {"value": value, "coarse": coarse, "spec": spec.as_dict(), "k": k, "testform": tf.name},
        )
    return VarianceResult(value, "exact", int(k), tf.name, err, params)


# --- zonal reduction ------------------------------------------------------


def legendre_moment(a: np.ndarray, l: int) -> np.ndarray:
    """int_0^1 t^a P_l(2t - 1) dt = prod_{i<l} (a - i) / prod_{i=1}^{l+1} (a + i)."""
    a = np.asarray(a, dtype=float)
    num = np.ones_like(a)
    for i in range(l):
        num = num * (a - i)
    den = np.ones_like(a)
    for i in range(1, l + 2):
        den = den * (a + i)
    return num / den


def zonal_coefficient(k: int, l: int, n_terms: int = 1_000_000) -> float:
    """c_l(k) = int_{-1}^{1} G(((1 + x)/2)^k) P_l(x) dx.

    Expands G termwise; each term is a Legendre moment in closed form. The
    tail beyond n_terms is replaced by its midpoint-rule integral, using
    moment(a) ~ 1/a.
    """
    n = np.arange(1, n_terms + 1, dtype=float)
    terms = legendre_moment(n * k, l) / (n * n)
    total = math.fsum(terms[::-1])
    tail = 1.0 / (2.0 * k * (n_terms + 0.5) ** 2)
    return 2.0 * (total + tail) / FOUR_PI_SQ


def zonal_variance_oracle(tf: TestForm, k: int, quad: SphereQuadrature | None = None) -> float:
    """Variance for a form whose f lies in one spherical-harmonic level l.

    Q_k depends on t = cos^2 d = (1 + x)/2 only, x = cosine of the angle on
    the unit sphere (area 4 pi, four times Omega). The zonal-kernel
    identity int K(x) Y_l dsigma = 2 pi int_{-1}^1 K(x) P_l(x) dx Y_l gives

        Var = (pi / 2) c_l(k) int f^2 Omega.
    """
    l = tf.degree
    if l is None:
        raise NotImplementedError(f"test form {tf.name!r} has no eigenvalue metadata")
    i_ff = integrate(lambda a, b: tf.f(a, b) ** 2, quad)
    if i_ff == 0.0:
        return 0.0
    return 0.5 * math.pi * zonal_coefficient(k, l) * i_ff


def bruteforce_variance(tf: TestForm, k: int, n_radial: int = 24, n_angular: int = 48) -> float:
    """Plain 4-D product rule over M x M; only sensible at small k."""
    quad = sphere_quadrature(n_radial, n_angular)
    fw = tf.f(quad.h0, quad.h1) * quad.weights
    total = 0.0
    for s in range(0, len(quad), 256):
        P = normalized_kernel_arrays(quad.h0[s : s + 256, None], quad.h1[s : s + 256, None], quad.h0[None, :], quad.h1[None, :], k)
        total += float(fw[s : s + 256] @ (g_function(P * P) @ fw))
    return total
