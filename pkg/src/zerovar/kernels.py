"""Szego kernel magnitudes on CP^1 and the two-point functions built from them.

For O(k) -> CP^1 with the Fubini-Study metric,

    |Pi_k(p, q)| = (k + 1)/pi * |<p, q>|^k,
    P_k(p, q)    = |<p, q>|^k,
    Q_k(p, q)    = G(P_k(p, q)^2).

Everything is carried as logarithms; an exact zero is log = -inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .geometry import ProjectivePoint, centering_matrices, geodesic_distance_arrays
from .specfun import DomainError, g_function

EXPANSION_WINDOW_B2 = 5.0


@dataclass(frozen=True)
class KernelValue:
    log_magnitude: float
    k: int

    @property
    def magnitude(self) -> float:
        return math.exp(self.log_magnitude) if self.log_magnitude > -math.inf else 0.0


def _check_k(k: int) -> None:
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")


def log_abs_inner(p0, p1, q0, q1):
    """log |<p, q>| computed as log cos d with cos d from the distance."""
    d = geodesic_distance_arrays(p0, p1, q0, q1)
    with np.errstate(divide="ignore"):
        # log cos d = 0.5 log1p(-sin^2 d) is accurate near the diagonal
        near = d < 0.7
        s = np.sin(d)
        out = np.where(near, 0.5 * np.log1p(-(s * s)), np.log(np.cos(d)))
    return np.where(d >= np.pi / 2, -np.inf, out)


def szego_magnitude(p: ProjectivePoint, q: ProjectivePoint, k: int) -> KernelValue:
    """Closed form: log |Pi_k| = log((k+1)/pi) + k log |<p, q>|."""
    _check_k(k)
    li = float(log_abs_inner(p.h0, p.h1, q.h0, q.h1))
    if li == -math.inf:
        return KernelValue(-math.inf, k)
    return KernelValue(math.log((k + 1) / math.pi) + k * li, k)


@lru_cache(maxsize=64)
def section_norms(k: int, dps: int, method: str = "quadrature") -> tuple:
    """Squared h^k-norms of the monomial sections z^j, j = 0..k, at ``dps`` digits.

    ``quadrature``: ||z^j||^2 = 2 pi int_0^inf r^(2j+1) (1+r^2)^(-k-2) dr,
    mapped by s = r^2/(1+r^2) to pi int_0^1 s^j (1-s)^(k-j) ds and integrated
    with Gauss-Legendre at a degree that is exact for this polynomial.
    ``beta``: the closed form pi j! (k-j)! / (k+1)!.
    """
    with mpmath.workdps(dps):
        if method == "beta":
            return tuple(
                mpmath.pi * mpmath.factorial(j) * mpmath.factorial(k - j) / mpmath.factorial(k + 1)
                for j in range(k + 1)
            )
        if method != "quadrature":
            raise ValueError(f"unknown norm method {method!r}")
        nodes, weights = _gauss_legendre_mp(k // 2 + 2, dps)
        norms = []
        # columns x^j (1-x)^(k-j) built by recurrence over j
        cols = [w * (1 - x) ** k for x, w in zip(nodes, weights)]
        ratios = [x / (1 - x) for x in nodes]
        for j in range(k + 1):
            norms.append(mpmath.pi * mpmath.fsum(cols))
            cols = [c * r for c, r in zip(cols, ratios)]
        return tuple(norms)


@lru_cache(maxsize=32)
def _gauss_legendre_mp(n: int, dps: int):
    """n-point Gauss-Legendre rule on [0, 1] at dps digits (Newton on P_n)."""
    with mpmath.workdps(dps + 10):
        nodes, weights = [], []
        for i in range(1, n + 1):
            x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (n + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for m in range(2, n + 1):
                    p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(10) ** (-(dps + 5)):
                    break
            p0, p1 = mpmath.mpf(1), x
            for m in range(2, n + 1):
                p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
            dp = n * (x * p1 - p0) / (x * x - 1)
            nodes.append((1 - x) / 2)
            weights.append(1 / ((1 - x * x) * dp * dp))
        return tuple(nodes), tuple(weights)


def _basis_sum(p: ProjectivePoint, q: ProjectivePoint, k: int, dps: int, method: str):
    inv_norms = _inverse_norms(k, dps, method)
    with mpmath.workdps(dps):
        a = mpmath.mpc(p.h0) * mpmath.conj(mpmath.mpc(q.h0))
        b = mpmath.mpc(p.h1) * mpmath.conj(mpmath.mpc(q.h1))
        b_pows = [mpmath.mpc(1)]
        for _ in range(k):
            b_pows.append(b_pows[-1] * b)
        total = mpmath.mpc(0)
        a_pow = mpmath.mpc(1)
        for j in range(k + 1):
            total += a_pow * b_pows[k - j] * inv_norms[j]
            a_pow *= a
        return abs(total)


@lru_cache(maxsize=64)
def _inverse_norms(k: int, dps: int, method: str) -> tuple:
    with mpmath.workdps(dps):
        return tuple(1 / n for n in section_norms(k, dps, method))


def szego_magnitude_basis(
    p: ProjectivePoint, q: ProjectivePoint, k: int, method: str = "quadrature", rel_tol: float = 1e-14
) -> KernelValue:
    """|K_k(p, q)| = |sum_j S_j(p) conj S_j(q)| over the orthonormal monomials.

    With normalized homogeneous coordinates the pointwise h^k-norm of the
    section h0^j h1^(k-j) is its modulus, so the sum is taken directly in
    those coordinates. The monomial expansion cancels heavily when
    |<p, q>| is small; working precision is raised until two successive
    evaluations agree to ``rel_tol``.
    """
    _check_k(k)
    dps = 30 + int(0.3 * k)
    prev = None
    for _ in range(8):
        val = _basis_sum(p, q, k, dps, method)
        if prev is not None:
            if val == 0 and prev == 0:
                return KernelValue(-math.inf, k)
            if val != 0 and abs(val - prev) <= rel_tol * abs(val):
                return KernelValue(float(mpmath.log(val)), k)
        prev = val
        dps = int(dps * 1.5) + 10
    raise ArithmeticError(f"basis summation did not stabilize for k={k}")


def normalized_kernel(p: ProjectivePoint, q: ProjectivePoint, k: int) -> float:
    """P_k(p, q) = |Pi_k(p, q)| / sqrt(Pi_k(p, p) Pi_k(q, q)) = |<p, q>|^k."""
    _check_k(k)
    if p == q:
        return 1.0
    return float(np.exp(k * log_abs_inner(p.h0, p.h1, q.h0, q.h1)))


def normalized_kernel_arrays(p0, p1, q0, q1, k: int):
    with np.errstate(under="ignore"):
        return np.exp(k * log_abs_inner(p0, p1, q0, q1))


def q_kernel(p: ProjectivePoint, q: ProjectivePoint, k: int) -> float:
    """Q_k = G(P_k^2), in [0, 1/24]."""
    _check_k(k)
    if p == q:
        return float(g_function(1.0))
    with np.errstate(under="ignore"):
        t = float(np.exp(2 * k * log_abs_inner(p.h0, p.h1, q.h0, q.h1)))
    return float(g_function(t))


def q_of_distance(d, k: int):
    """Q_k as a function of geodesic distance (scalar or array)."""
    d = np.asarray(d, dtype=float)
    with np.errstate(under="ignore", divide="ignore"):
        s = np.sin(d)
        logc = np.where(d < 0.7, 0.5 * np.log1p(-(s * s)), np.log(np.cos(np.minimum(d, np.pi / 2))))
        t = np.where(d >= np.pi / 2, 0.0, np.exp(2 * k * logc))
    return g_function(t)


# --- far-field decay -----------------------------------------------------


def decay_threshold(k: int, p_exponent: float, kind: str = "P") -> float:
    """sqrt((2p+1) log k / k) for P_k, sqrt((p+1) log k / k) for Q_k."""
    c = 2 * p_exponent + 1 if kind == "P" else p_exponent + 1
    return math.sqrt(c * math.log(k) / k)


@dataclass
class DecayReport:
    p_exponent: float
    k_values: list[int]
    thresholds: list[float]
    sup_values: list[float]
    ratios: list[float]
    q_thresholds: list[float] = field(default_factory=list)
    q_ratios: list[float] = field(default_factory=list)
    passed: bool = False

    def as_dict(self) -> dict:
        return {
            "p": self.p_exponent,
            "k": self.k_values,
            "threshold": self.thresholds,
            "sup_P": self.sup_values,
            "ratio_P": self.ratios,
            "q_threshold": self.q_thresholds,
            "ratio_Q": self.q_ratios,
            "pass": self.passed,
        }


def _sup_on_circle(k: int, d: float, n_base: int = 4, n_angle: int = 32) -> tuple[float, float]:
    """sup of P_k and Q_k over points at distance d from a few base points."""
    if d >= math.pi / 2:
        return 0.0, 0.0
    rng = np.random.default_rng(12345)
    best_p, best_q = 0.0, 0.0

    theta = 2 * np.pi * np.arange(n_angle) / n_angle
    v = math.tan(d) * np.exp(1j * theta)
    nv = np.sqrt(1 + np.abs(v) ** 2)
    for _ in range(n_base):
        b = rng.normal(size=4)
        base = ProjectivePoint(complex(b[0], b[1]), complex(b[2], b[3]))
        U = centering_matrices(base.h0, base.h1)
        w0 = (U[0, 0] * v + U[0, 1]) / nv
        w1 = (U[1, 0] * v + U[1, 1]) / nv
        P = normalized_kernel_arrays(base.h0, base.h1, w0, w1, k)
        best_p = max(best_p, float(np.max(P)))
        best_q = max(best_q, float(np.max(g_function(P * P))))
    return best_p, best_q


def decay_margin(k: int, p_exponent: float, n_doublings: int = 2, ladder: list[int] | None = None) -> DecayReport:
    """Check P_k = O(k^-p) beyond distance sqrt((2p+1) log k / k).

    For each k on the ladder (k, 2k, 4k, ... unless ``ladder`` is given) the
    sup of P_k on the threshold circle is compared with k^-p. PASS means the
    ratios never grow by more than 10% along the ladder. The same is
    recorded for Q_k at its own threshold sqrt((p+1) log k / k).
    """
    if k < 2 or p_exponent <= 0:
        raise DomainError("decay_margin needs k >= 2 and p > 0")
    ks = list(ladder) if ladder is not None else [k * 2**i for i in range(n_doublings + 1)]
    rep = DecayReport(p_exponent, ks, [], [], [])
    for kk in ks:
        d = decay_threshold(kk, p_exponent, "P")
        sup_p, _ = _sup_on_circle(kk, d)
        rep.thresholds.append(d)
        rep.sup_values.append(sup_p)
        rep.ratios.append(sup_p * kk**p_exponent)
        dq = decay_threshold(kk, p_exponent, "Q")
        _, sup_q = _sup_on_circle(kk, dq)
        rep.q_thresholds.append(dq)
        rep.q_ratios.append(sup_q * kk**p_exponent)
    rep.passed = all(b <= 1.1 * a for a, b in zip(rep.ratios, rep.ratios[1:]))
    return rep


# --- near-diagonal expansion --------------------------------------------


def expansion_window(k: int, b2: float = EXPANSION_WINDOW_B2) -> float:
    return math.sqrt(b2 * math.log(k))


def scaled_kernel_excess(u: complex, k: int) -> float:
    """e^{|u|^2} P_k(z0 + u/sqrt k, z0)^2 - 1 at z0 = [0:1]."""
    z0 = ProjectivePoint.origin()
    w = ProjectivePoint.from_affine(complex(u) / math.sqrt(k))
    log_p2 = 2 * k * float(log_abs_inner(w.h0, w.h1, z0.h0, z0.h1))
    return math.expm1(abs(u) ** 2 + log_p2)


def expansion_residual(u: complex, k: int) -> float:
    """k (e^{|u|^2} P_k^2 - 1) - R(u, ubar, u, ubar)/4, with R(...)/4 = |u|^4/2 on CP^1.

    Defined on the window |u| <= sqrt(5 log k); the residual is O(1/k).
    """
    if k < 2:
        raise DomainError("expansion_residual needs k >= 2")
    if abs(u) > expansion_window(k) * (1 + 1e-12):
        raise DomainError(f"|u| = {abs(u):.4g} outside window sqrt(5 log k) = {expansion_window(k):.4g}")
    return k * scaled_kernel_excess(u, k) - 0.5 * abs(u) ** 4


def first_order_coefficient(u: complex, ks) -> tuple[float, float]:
    """Least-squares fit of e^{|u|^2} P_k^2 - 1 against (k^-1/2, k^-1).

    Returns (a1, a2); for this metric a1 ~ 0 and a2 ~ |u|^4/2.
    """
    ks = np.asarray(ks, dtype=float)
    y = np.array([scaled_kernel_excess(u, int(k)) for k in ks])
    A = np.column_stack([ks**-0.5, ks**-1.0])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1])
