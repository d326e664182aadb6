"""CP^1 with the Fubini-Study form omega = (i/2) d dbar log(1 + |z|^2).

Total area is pi (round sphere of radius 1/2). Points are unit-norm
homogeneous pairs; the affine chart z = h0/h1 is used where |h1| >= 1/sqrt(2)
and the conjugate chart w = h1/h0 elsewhere.

Conventions: Delta_LB is div grad (negative spectrum) for the Riemannian
metric (1 + |z|^2)^(-2) |dz|^2, and i d dbar psi = f Omega with
f = Delta_LB psi / 2 = 2 (1 + |z|^2)^2 d^2 psi / dz dzbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

AREA = math.pi
SCALAR_CURVATURE = 2.0
_CHART_SPLIT = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class ProjectivePoint:
    """A point [h0 : h1] of CP^1, normalized on construction."""

    h0: complex
    h1: complex

    def __post_init__(self) -> None:
        h0, h1 = complex(self.h0), complex(self.h1)
        norm = math.hypot(abs(h0), abs(h1))
        if norm == 0.0:
            raise ValueError("[0:0] is not a point of CP^1")
        object.__setattr__(self, "h0", h0 / norm)
        object.__setattr__(self, "h1", h1 / norm)

    @classmethod
    def from_affine(cls, z: complex) -> "ProjectivePoint":
        return cls(z, 1.0)

    @classmethod
    def from_conjugate(cls, w: complex) -> "ProjectivePoint":
        return cls(1.0, w)

    @classmethod
    def infinity(cls) -> "ProjectivePoint":
        return cls(1.0, 0.0)

    @classmethod
    def origin(cls) -> "ProjectivePoint":
        return cls(0.0, 1.0)

    @property
    def chart(self) -> tuple[str, complex]:
        """('z', h0/h1) if |h1| >= 1/sqrt 2, otherwise ('w', h1/h0)."""
        if abs(self.h1) >= _CHART_SPLIT:
            return "z", self.h0 / self.h1
        return "w", self.h1 / self.h0

    @property
    def z(self) -> complex:
        if self.h1 == 0:
            return complex(math.inf, 0.0)
        return self.h0 / self.h1

    def antipode(self) -> "ProjectivePoint":
        return ProjectivePoint(-self.h1.conjugate(), self.h0.conjugate())

    def transform(self, U: np.ndarray) -> "ProjectivePoint":
        v = np.asarray(U) @ np.array([self.h0, self.h1])
        return ProjectivePoint(v[0], v[1])

    def as_array(self) -> np.ndarray:
        return np.array([self.h0, self.h1], dtype=complex)


def hermitian_product(p0, p1, q0, q1):
    """<p, q> = p0 conj(q0) + p1 conj(q1), broadcasting over arrays."""
    return p0 * np.conj(q0) + p1 * np.conj(q1)


def geodesic_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Fubini-Study distance arccos |<p, q>| in [0, pi/2]."""
    return float(geodesic_distance_arrays(p.h0, p.h1, q.h0, q.h1))


def geodesic_distance_arrays(p0, p1, q0, q1):
    # atan2 keeps full relative accuracy for nearby and nearly orthogonal points
    cos_d = np.abs(hermitian_product(p0, p1, q0, q1))
    sin_d = np.abs(p0 * q1 - p1 * q0)
    return np.arctan2(sin_d, cos_d)


def fs_potential(z):
    """Kaehler potential log(1 + |z|^2) of the affine chart."""
    return np.log1p(np.abs(z) ** 2)


def metric_density(z):
    """g_{1 1bar}(z) = (1 + |z|^2)^(-2)."""
    return 1.0 / (1.0 + np.abs(z) ** 2) ** 2


def scalar_curvature(p: ProjectivePoint | None = None) -> float:
    """rho = g^{-2} R_{1 1bar 1 1bar}; constantly 2 for this normalization."""
    return SCALAR_CURVATURE


def scalar_curvature_fd(z: complex, h: float = 1e-3) -> float:
    """Scalar curvature at affine coordinate z from finite differences of g.

    Uses R = -d^2 g / dz dzbar + |dg/dz|^2 / g with Wirtinger derivatives
    d/dz dzbar = Laplacian / 4 and |dg/dz|^2 = |grad g|^2 / 4 (g is real).
    """
    x, y = z.real, z.imag

    def g(a, b):
        return 1.0 / (1.0 + a * a + b * b) ** 2

    g0 = g(x, y)
    gx = (g(x + h, y) - g(x - h, y)) / (2 * h)
    gy = (g(x, y + h) - g(x, y - h)) / (2 * h)
    lap = (g(x + h, y) + g(x - h, y) + g(x, y + h) + g(x, y - h) - 4 * g0) / (h * h)
    R = -0.25 * lap + 0.25 * (gx * gx + gy * gy) / g0
    return R / (g0 * g0)


@dataclass(frozen=True)
class CurvatureData:
    """Curvature R[j, lbar, p, qbar] at a point where the metric is the identity."""

    m: int
    tensor: np.ndarray
    rho: float

    def __post_init__(self) -> None:
        R = self.tensor
        if R.shape != (self.m,) * 4:
            raise ValueError(f"tensor shape {R.shape} does not match m={self.m}")
        if not (np.allclose(R, R.transpose(2, 1, 0, 3)) and np.allclose(R, R.transpose(0, 3, 2, 1))):
            raise ValueError("tensor lacks the Kaehler symmetries")


def fs_curvature(m: int) -> CurvatureData:
    """Curvature of CP^m at the origin of the affine chart for phi = log(1 + |z|^2).

    R_{j lbar p qbar} = -d^4 phi(0) = delta_jl delta_pq + delta_jq delta_pl,
    so rho = m (m + 1).
    """
    eye = np.eye(m)
    R = np.einsum("jl,pq->jlpq", eye, eye) + np.einsum("jq,pl->jlpq", eye, eye)
    rho = float(np.einsum("jjpp->", R))
    return CurvatureData(m=m, tensor=R, rho=rho)


# --- SU(2) action --------------------------------------------------------


def su2_matrix(a: complex, b: complex) -> np.ndarray:
    """[[a, -conj b], [b, conj a]] normalized to |a|^2 + |b|^2 = 1."""
    n = math.hypot(abs(a), abs(b))
    a, b = a / n, b / n
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]], dtype=complex)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=4)
    return su2_matrix(complex(v[0], v[1]), complex(v[2], v[3]))


def centering_matrices(h0, h1) -> np.ndarray:
    """Unitary U (shape (..., 2, 2)) with U [0 : 1] = [h0 : h1].

    The chart centered at p sends local coordinate v to U (v, 1) / |(v, 1)|;
    in it the potential is again log(1 + |v|^2).
    """
    h0 = np.asarray(h0, dtype=complex)
    h1 = np.asarray(h1, dtype=complex)
    U = np.empty(h0.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = np.conj(h1)
    U[..., 0, 1] = h0
    U[..., 1, 0] = -np.conj(h0)
    U[..., 1, 1] = h1
    return U


# --- quadrature ----------------------------------------------------------


@dataclass(frozen=True)
class SphereQuadrature:
    """Two-chart product rule: each closed unit disk (z-chart, w-chart) with
    Gauss-Legendre in r and the periodic trapezoid rule in theta.

    Weights are Omega = (1 + r^2)^(-2) r dr dtheta.
    """

    h0: np.ndarray
    h1: np.ndarray
    weights: np.ndarray
    n_radial: int
    n_angular: int

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(values, self.weights))

    def __len__(self) -> int:
        return self.weights.size


@lru_cache(maxsize=16)
def sphere_quadrature(n_radial: int = 64, n_angular: int = 128) -> SphereQuadrature:
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * wx
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    wt = np.full(n_angular, 2.0 * np.pi / n_angular)
    R, T = np.meshgrid(r, theta, indexing="ij")
    W = np.outer(wr * r / (1.0 + r * r) ** 2, wt).ravel()
    c = (R * np.exp(1j * T)).ravel()
    norm = np.sqrt(1.0 + np.abs(c) ** 2)
    # z-chart [c : 1] and w-chart [1 : c]
    h0 = np.concatenate([c / norm, 1.0 / norm])
    h1 = np.concatenate([1.0 / norm, c / norm])
    weights = np.concatenate([W, W])
    for arr in (h0, h1, weights):
        arr.setflags(write=False)
    return SphereQuadrature(h0, h1, weights, n_radial, n_angular)


# --- test forms ----------------------------------------------------------


ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestForm:
    """A real test function psi on CP^1 and f with i d dbar psi = f Omega.

    ``psi`` and ``f`` take arrays of normalized homogeneous coordinates
    (h0, h1). ``eigenvalue`` is lambda when Delta_LB psi = -lambda psi; then
    f = -(lambda / 2) psi and ``degree`` is the spherical-harmonic level l
    with lambda = 4 l (l + 1).
    """

    __test__ = False  # not a pytest class

    name: str
    psi: ScalarField = field(repr=False)
    f: ScalarField = field(repr=False)
    eigenvalue: Optional[float] = None

    @property
    def degree(self) -> Optional[int]:
        if self.eigenvalue is None:
            return None
        l = int(round((-1.0 + math.sqrt(1.0 + self.eigenvalue)) / 2.0))
        if abs(4 * l * (l + 1) - self.eigenvalue) > 1e-9:
            return None
        return l

    def psi_at(self, p: ProjectivePoint) -> float:
        return float(self.psi(np.array(p.h0), np.array(p.h1)))

    def f_at(self, p: ProjectivePoint) -> float:
        return float(self.f(np.array(p.h0), np.array(p.h1)))

    def rotated(self, U: np.ndarray) -> "TestForm":
        """The form psi o U^{-1}; an SU(2) rotation preserves f's relation."""
        Uinv = np.conj(np.asarray(U)).T

        def pull(field_):
            def g(h0, h1):
                return field_(Uinv[0, 0] * h0 + Uinv[0, 1] * h1, Uinv[1, 0] * h0 + Uinv[1, 1] * h1)

            return g

        return TestForm(f"{self.name}@rot", pull(self.psi), pull(self.f), self.eigenvalue)


def _height(h0, h1):
    # cos of the polar angle of the unit sphere: (1 - |z|^2) / (1 + |z|^2)
    return np.abs(h1) ** 2 - np.abs(h0) ** 2


def _const_psi(h0, h1):
    return np.ones(np.broadcast(h0, h1).shape)


def _zero_f(h0, h1):
    return np.zeros(np.broadcast(h0, h1).shape)


def _psi1(h0, h1):
    return _height(h0, h1)


def _f1(h0, h1):
    return -4.0 * _height(h0, h1)


def _psi2(h0, h1):
    return np.real(2.0 * h0 * np.conj(h1))


def _f2(h0, h1):
    return -4.0 * _psi2(h0, h1)


def _psi_zonal2(h0, h1):
    c = _height(h0, h1)
    return 0.5 * (3.0 * c * c - 1.0)


def _f_zonal2(h0, h1):
    return -12.0 * _psi_zonal2(h0, h1)


def _psi_bump(h0, h1):
    # exp(-|z|^2) with |z|^2 = (1 - t) / t, t = |h1|^2; flat at z = infinity
    t = np.abs(h1) ** 2
    safe = np.where(t > 0.0, t, 1.0)
    return np.where(t > 0.0, np.exp(-(1.0 - safe) / safe), 0.0)


def _f_bump(h0, h1):
    # 2 (1 + r^2)^2 (r^2 - 1) e^{-r^2}, r^2 = (1 - t)/t  =>  2 t^-3 (1 - 2t) e^{-(1-t)/t}
    t = np.abs(h1) ** 2
    safe = np.where(t > 1e-3, t, 1.0)
    val = 2.0 * (1.0 - 2.0 * safe) / safe**3 * np.exp(-(1.0 - safe) / safe)
    return np.where(t > 1e-3, val, 0.0)


def testform_library() -> list[TestForm]:
    """Named test forms.

    ``psi1``  height function (1 - |z|^2)/(1 + |z|^2), level 1, f = -4 psi1
    ``psi2``  Re 2z/(1 + |z|^2), level 1
    ``zonal2`` Legendre P_2 of the height, level 2, f = -12 psi
    ``bump``  exp(-|z|^2), not an eigenfunction
    ``one``   the constant 1 (f = 0)
    """
    return [
        TestForm("psi1", _psi1, _f1, 8.0),
        TestForm("psi2", _psi2, _f2, 8.0),
        TestForm("zonal2", _psi_zonal2, _f_zonal2, 24.0),
        TestForm("bump", _psi_bump, _f_bump, None),
        TestForm("one", _const_psi, _zero_f, 0.0),
    ]


def get_testform(name: str) -> TestForm:
    for tf in testform_library():
        if tf.name == name:
            return tf
    names = ", ".join(t.name for t in testform_library())
    raise KeyError(f"unknown test form {name!r}; available: {names}")


def affine_field(field_: ScalarField) -> Callable[[np.ndarray], np.ndarray]:
    """View a homogeneous-coordinate field as a function of the affine z."""

    def g(z):
        z = np.asarray(z, dtype=complex)
        n = np.sqrt(1.0 + np.abs(z) ** 2)
        return field_(z / n, 1.0 / n)

    return g


def integrate(field_: ScalarField, quad: SphereQuadrature | None = None) -> float:
    quad = quad or sphere_quadrature()
    return quad.integrate(field_(quad.h0, quad.h1))
