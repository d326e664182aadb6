"""Leading and sub-leading coefficients of k^m Var (Z_k, psi).

    A0 = pi^(m-2) zeta(m+2)/4 * int f^2 Omega
    A1 = -pi^(m-2) zeta(m+3) * (int rho f^2 Omega / 8 + ||dbar f||^2 / 4)

||dbar f||^2 = <dbar* dbar f, f> where dbar* dbar f = -sum_p f_{p pbar} in
normal coordinates. On CP^1 that is -Delta_LB f / 4 under the module's
Laplacian convention, so for an eigenfunction with Delta_LB f = -lambda f
one has ||dbar f||^2 = (lambda / 4) int f^2 Omega. Equivalently, pointwise
|dbar f|^2 Omega = |df/dzbar|^2 dx dy, which is what the finite-difference
route integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import TestForm, affine_field, integrate, scalar_curvature, sphere_quadrature
from ..specfun import riemann_zeta


@dataclass(frozen=True)
class CoefficientIntegrals:
    I_ff: float
    I_rff: float
    I_dbarf: float
    dbar_method: str = "eigen"


@dataclass(frozen=True)
class AsymptoticCoefficients:
    A0: float
    A1: float
    m: int
    integrals: CoefficientIntegrals

    def __post_init__(self) -> None:
        if self.A0 < 0:
            raise ValueError("A0 must be nonnegative")

    def predict(self, k: int) -> float:
        """Two-term variance A0 k^-m + A1 k^-m-1."""
        return self.A0 * k ** (-self.m) + self.A1 * k ** (-self.m - 1)

    def as_dict(self) -> dict:
        return {
            "A0": self.A0,
            "A1": self.A1,
            "m": self.m,
            "I_ff": self.integrals.I_ff,
            "I_rff": self.integrals.I_rff,
            "I_dbarf": self.integrals.I_dbarf,
            "dbar_method": self.integrals.dbar_method,
        }


def dbar_norm_fd(tf: TestForm, n_radial: int = 64, n_angular: int = 128, h: float = 1e-4) -> float:
    """||dbar f||^2 = int |df/dzbar|^2 dx dy over both chart disks.

    df/dzbar = (f_x + i f_y)/2 by central differences, so the integrand is
    (f_x^2 + f_y^2)/4 for real f.
    """
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * wx * r
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    c = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    w = np.outer(wr, np.full(n_angular, 2.0 * np.pi / n_angular)).ravel()

    def conj_chart(field_):
        def g(h0, h1):
            return field_(h1, h0)

        return g

    total = 0.0
    for fld in (tf.f, conj_chart(tf.f)):
        F = affine_field(fld)
        fx = (F(c + h) - F(c - h)) / (2 * h)
        fy = (F(c + 1j * h) - F(c - 1j * h)) / (2 * h)
        total += float(np.dot(0.25 * (fx * fx + fy * fy), w))
    return total


def coefficient_integrals(tf: TestForm, method: str = "auto") -> CoefficientIntegrals:
    """I_ff = int f^2 Omega, I_rff = int rho f^2 Omega, I_dbarf = ||dbar f||^2.

    ``method``: "eigen" uses (lambda/4) I_ff, "fd" the finite-difference
    gradient quadrature, "auto" picks eigen when eigenvalue metadata exists.
    """
    quad = sphere_quadrature()
    f2 = tf.f(quad.h0, quad.h1) ** 2
    i_ff = quad.integrate(f2)
    i_rff = quad.integrate(scalar_curvature() * f2)
    if method == "auto":
        method = "eigen" if tf.eigenvalue is not None else "fd"
    if method == "eigen":
        if tf.eigenvalue is None:
            raise ValueError(f"{tf.name} has no eigenvalue")
        i_dbar = 0.25 * tf.eigenvalue * i_ff
    elif method == "fd":
        i_dbar = dbar_norm_fd(tf)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CoefficientIntegrals(i_ff, i_rff, i_dbar, method)


def asymptotic_coefficients(m: int, integrals: CoefficientIntegrals) -> AsymptoticCoefficients:
    if m < 1:
        raise ValueError("m must be >= 1")
    pre = math.pi ** (m - 2)
    A0 = pre * riemann_zeta(m + 2) / 4.0 * integrals.I_ff
    A1 = -pre * riemann_zeta(m + 3) * (integrals.I_rff / 8.0 + integrals.I_dbarf / 4.0)
    return AsymptoticCoefficients(A0, A1, m, integrals)


def riemann_surface_coefficients(lap_psi_sq: float, rho_lap_psi_sq: float, d_lap_psi_sq: float) -> tuple[float, float]:
    """Coefficients in the Riemann-surface form

        zeta(3)/(16 pi) ||Delta psi||^2 k^-1
        - pi^3/2880 (int rho |Delta psi|^2 omega + ||d Delta psi||^2 / 2) k^-2.
    """
    A0 = riemann_zeta(3) / (16 * math.pi) * lap_psi_sq
    A1 = -(math.pi**3) / 2880 * (rho_lap_psi_sq + 0.5 * d_lap_psi_sq)
    return A0, A1


def asymptotic_variance(tf: TestForm, k: int, method: str = "auto"):
    """VarianceResult for the two-term asymptotic prediction."""
    from .exact import VarianceResult

    coeffs = asymptotic_coefficients(1, coefficient_integrals(tf, method))
    value = coeffs.predict(k)
    # next term is O(k^-3); its size is not known, report the A1 term as scale
    err = abs(coeffs.A1) / k**2 / k
    return VarianceResult(value, "asymptotic", int(k), tf.name, err, coeffs.as_dict())


def integral_of_f(tf: TestForm) -> float:
    """int f Omega; zero for every test form because i d dbar psi is exact."""
    return integrate(tf.f)
