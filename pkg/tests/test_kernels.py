import math

import numpy as np
import pytest

from zerovar.geometry import ProjectivePoint, geodesic_distance, sphere_quadrature
from zerovar.kernels import (
    decay_margin,
    decay_threshold,
    expansion_residual,
    first_order_coefficient,
    normalized_kernel,
    normalized_kernel_arrays,
    q_kernel,
    q_of_distance,
    section_norms,
    szego_magnitude,
    szego_magnitude_basis,
)
from zerovar.specfun import DomainError

# G(cos^200(0.1)) from mpmath polylog at 30 digits
Q_K100_D01 = 0.01033447186289404


def random_pairs(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, 2, 4))
    return [
        (ProjectivePoint(complex(a[0], a[1]), complex(a[2], a[3])), ProjectivePoint(complex(b[0], b[1]), complex(b[2], b[3])))
        for a, b in g
    ]


def test_diagonal_value():
    p = ProjectivePoint.from_affine(0.4 - 2j)
    assert szego_magnitude(p, p, 10).magnitude == pytest.approx(11 / math.pi, rel=1e-12)
    assert szego_magnitude_basis(p, p, 10).magnitude == pytest.approx(11 / math.pi, rel=1e-10)


def test_orthogonal_points():
    kv = szego_magnitude(ProjectivePoint.infinity(), ProjectivePoint.origin(), 7)
    assert kv.log_magnitude == -math.inf and kv.magnitude == 0.0


def test_small_basis_example():
    o, q = ProjectivePoint.origin(), ProjectivePoint.from_affine(1.0)
    for method in ("quadrature", "beta"):
        assert szego_magnitude_basis(o, q, 2, method=method).magnitude == pytest.approx(1.5 / math.pi, rel=1e-12)


def test_section_norms_quadrature_vs_beta():
    a = section_norms(12, 40, "quadrature")
    b = section_norms(12, 40, "beta")
    assert all(abs(x / y - 1) < 1e-25 for x, y in zip(a, b))


@pytest.mark.parametrize("k", [1, 2, 10, 50])
def test_route_equivalence_sample(k):
    for p, q in random_pairs(10, k):
        a = szego_magnitude(p, q, k).log_magnitude
        b = szego_magnitude_basis(p, q, k).log_magnitude
        assert abs(a - b) <= 1e-10


def test_log_domain_large_k():
    p, q = random_pairs(1, 9)[0]
    kv = szego_magnitude(p, q, 100_000)
    # the magnitude underflows, the log does not
    assert math.isfinite(kv.log_magnitude)
    expected = math.log(100_001 / math.pi) + 100_000 * math.log(math.cos(geodesic_distance(p, q)))
    assert kv.log_magnitude == pytest.approx(expected, rel=1e-12)


def test_k_domain():
    p = ProjectivePoint.origin()
    with pytest.raises(DomainError):
        szego_magnitude(p, p, 0)


def test_normalized_kernel_basic():
    p, q = random_pairs(1, 2)[0]
    assert normalized_kernel(p, p, 37) == 1.0
    assert normalized_kernel(p, q, 37) == pytest.approx(normalized_kernel(q, p, 37), rel=1e-14)
    assert normalized_kernel(p, q, 37) == pytest.approx(math.cos(geodesic_distance(p, q)) ** 37, rel=1e-12)
    assert normalized_kernel(ProjectivePoint.origin(), ProjectivePoint.infinity(), 3) == 0.0


@pytest.mark.parametrize("k", [5, 50, 400])
def test_scaled_kernel_closed_form(k):
    for u in (0.3, 1.0 + 1.0j, 2.5j):
        w = ProjectivePoint.from_affine(u / math.sqrt(k))
        p2 = normalized_kernel(ProjectivePoint.origin(), w, k) ** 2
        assert p2 == pytest.approx((1 + abs(u) ** 2 / k) ** (-k), rel=1e-12)


def test_q_kernel_values():
    p = ProjectivePoint.from_affine(0.2)
    assert q_kernel(p, p, 10) == pytest.approx(1 / 24, abs=1e-15)
    assert q_kernel(p, p.antipode(), 10) == 0.0
    assert q_of_distance(0.1, 100) == pytest.approx(Q_K100_D01, abs=1e-13)


def test_q_kernel_range():
    for p, q in random_pairs(20, 4):
        v = q_kernel(p, q, 5)
        assert 0.0 <= v <= 1 / 24


@pytest.mark.parametrize("k", [1, 5, 20, 50])
def test_reproducing_identity(k):
    quad = sphere_quadrature(96, 192)
    for p, _ in random_pairs(3, 11):
        P = normalized_kernel_arrays(p.h0, p.h1, quad.h0, quad.h1, k)
        total = quad.integrate(P * P) * (k + 1) / math.pi
        assert abs(total - 1) < 1e-6


def test_monotone_in_distance():
    d = np.linspace(0.0, math.pi / 2 - 1e-3, 200)
    v = np.cos(d) ** 30
    o = ProjectivePoint.origin()
    vals = [normalized_kernel(o, ProjectivePoint.from_affine(math.tan(x)), 30) for x in d]
    assert np.allclose(vals, v, rtol=1e-12)
    assert np.all(np.diff(vals) < 0)


def test_decay_example_k100():
    rep = decay_margin(100, 1.0, n_doublings=0)
    assert rep.thresholds[0] == pytest.approx(math.sqrt(3 * math.log(100) / 100))
    assert rep.ratios[0] <= 1.0
    # cos^k d ~ exp(-k d^2 / 2) = k^-(3/2)
    assert rep.sup_values[0] == pytest.approx(100**-1.5, rel=0.2)


def test_decay_ladder():
    rep = decay_margin(50, 1.0, ladder=[50, 100, 200])
    assert rep.passed
    assert rep.as_dict()["pass"] is True


def test_decay_threshold_beyond_range():
    # at distance pi/2 the kernel vanishes
    assert normalized_kernel(ProjectivePoint.origin(), ProjectivePoint.infinity(), 4) == 0.0
    assert decay_threshold(4, 0.5) < math.pi / 2


def test_decay_margin_domain():
    with pytest.raises(DomainError):
        decay_margin(1, 1.0)
    with pytest.raises(DomainError):
        decay_margin(10, 0.0)


def test_expansion_residual_zero():
    for k in (2, 100, 1000):
        assert expansion_residual(0.0, k) == 0.0


def test_expansion_residual_closed_form():
    k = 100
    expected = k * ((1 + 1 / k) ** (-k) * math.e - 1) - 0.5
    r = expansion_residual(1.0, k)
    assert r == pytest.approx(expected, rel=1e-9)
    assert abs(r) <= 0.02


def test_expansion_residual_halves():
    for k in (100, 200, 400):
        ratio = expansion_residual(1.0, 2 * k) / expansion_residual(1.0, k)
        assert abs(ratio - 0.5) <= 0.15 * 0.5


def test_expansion_window():
    with pytest.raises(DomainError):
        expansion_residual(5.0, 100)  # sqrt(5 log 100) ~ 4.8
    with pytest.raises(DomainError):
        expansion_residual(0.5, 1)


def test_first_order_term_vanishes():
    for u in (0.5, 1.0, 1.5j):
        a1, a2 = first_order_coefficient(u, [100, 200, 400, 800, 1600, 3200])
        assert abs(a1) <= 1e-3
        assert a2 == pytest.approx(abs(u) ** 4 / 2, rel=0.05)
