import math

import numpy as np
import pytest

from zerovar.geometry import get_testform, random_su2
from zerovar.variance import (
    QuadratureError,
    QuadratureSpec,
    VarianceResult,
    bruteforce_variance,
    exact_variance,
    zonal_variance_oracle,
)
from zerovar.variance.exact import far_field_bound, legendre_moment, near_field_radius, zonal_coefficient
from zerovar.specfun import DomainError

# Var(psi1) = (1/k) (4/3) sum_n k^2 / (n (nk + 1)(nk + 2)), summed with mpmath at 30 digits
PSI1_VAR = {
    1: 1 / 3,
    20: 0.0704083028382521819862640447846,
    50: 0.0303974302001198401465387184941,
    100: 0.0156039746909102937067902185887,
}
# same reduction for the level-2 form, mpmath
ZONAL2_VAR = {20: 0.320796746474767117682736759078, 50: 0.153001850602552796484264552531}


@pytest.mark.parametrize("k", [1, 20, 50, 100])
def test_zonal_oracle_matches_series(k):
    assert zonal_variance_oracle(get_testform("psi1"), k) == pytest.approx(PSI1_VAR[k], rel=1e-10)


@pytest.mark.parametrize("k", [20, 50])
def test_zonal_oracle_level_two(k):
    assert zonal_variance_oracle(get_testform("zonal2"), k) == pytest.approx(ZONAL2_VAR[k], rel=1e-10)


def test_single_zero_variance():
    # k = 1: one zero, uniform on the sphere; Var(height) = 1/3
    vr = exact_variance(get_testform("psi1"), 1)
    assert vr.value == pytest.approx(1 / 3, rel=1e-8)


@pytest.mark.parametrize("name,k", [("psi1", 20), ("psi1", 100), ("psi2", 50), ("zonal2", 20)])
def test_exact_vs_oracle(name, k):
    tf = get_testform(name)
    vr = exact_variance(tf, k)
    assert vr.value == pytest.approx(zonal_variance_oracle(tf, k), rel=1e-6)
    assert vr.error_estimate < 1e-6 * vr.value
    assert vr.route == "exact" and vr.k == k and vr.testform == name


def test_bruteforce_small_k():
    tf = get_testform("psi1")
    assert bruteforce_variance(tf, 1) == pytest.approx(exact_variance(tf, 1).value, rel=1e-3)
    assert bruteforce_variance(tf, 2) == pytest.approx(zonal_variance_oracle(tf, 2), rel=1e-3)


def test_constant_form_has_zero_variance():
    vr = exact_variance(get_testform("one"), 50)
    assert vr.value == 0.0
    assert zonal_variance_oracle(get_testform("one"), 50) == 0.0


def test_rotation_invariance():
    rng = np.random.default_rng(8)
    tf = get_testform("psi1")
    base = exact_variance(tf, 30).value
    for _ in range(2):
        rot = tf.rotated(random_su2(rng))
        assert exact_variance(rot, 30).value == pytest.approx(base, abs=1e-8)


def test_bump_positive_and_converged():
    vr = exact_variance(get_testform("bump"), 50)
    assert vr.value > 0
    assert vr.value >= -vr.error_estimate
    fine = exact_variance(get_testform("bump"), 50, QuadratureSpec(outer_nodes=48, inner_radial=20, inner_angular=60))
    assert abs(vr.value - fine.value) <= vr.error_estimate


def test_nonconvergence_raises_with_diagnostics():
    spec = QuadratureSpec(outer_nodes=6, inner_radial=4, inner_angular=8, rel_tol=1e-12)
    with pytest.raises(QuadratureError) as info:
        exact_variance(get_testform("bump"), 50, spec)
    assert info.value.diagnostics["k"] == 50
    assert "coarse" in info.value.diagnostics


def test_invalid_k():
    with pytest.raises(DomainError):
        exact_variance(get_testform("psi1"), 0)


def test_quadrature_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(cutoff_b=1.5)
    with pytest.raises(ValueError):
        QuadratureSpec(outer_nodes=0)
    h = QuadratureSpec().halved()
    assert h.outer_nodes == 16 and h.cutoff_b == 2.0


def test_far_field_bound_is_small():
    spec = QuadratureSpec()
    d_c = near_field_radius(400, spec.cutoff_b)
    assert math.sqrt(400) * math.tan(d_c) == pytest.approx(2.0 * math.sqrt(math.log(400)))
    # cos^{2k} d_c <= k^-(b^2 - 1) up to the tan/angle slack
    assert far_field_bound(400, spec, 1.0) <= 400.0 ** -(spec.cutoff_b**2 - 1)


def test_legendre_moment_formula():
    # int_0^1 t^a P_2(2t - 1) dt for a = 3
    x, w = np.polynomial.legendre.leggauss(20)
    t = 0.5 * (x + 1)
    direct = 0.5 * np.sum(w * t**3 * 0.5 * (3 * (2 * t - 1) ** 2 - 1))
    assert legendre_moment(np.array([3.0]), 2)[0] == pytest.approx(direct, rel=1e-13)


def test_zonal_coefficient_tail():
    # truncation plus tail estimate is stable against the term count
    assert zonal_coefficient(30, 1, 10_000) == pytest.approx(zonal_coefficient(30, 1, 1_000_000), rel=1e-10)


def test_variance_result_validation():
    with pytest.raises(ValueError):
        VarianceResult(-1.0, "exact", 10, "psi1", 1e-6)
    vr = VarianceResult(-0.1, "asymptotic", 1, "psi1", 0.0)
    assert vr.flagged
    assert vr.as_dict()["route"] == "asymptotic"


def test_oracle_rejects_non_eigen():
    with pytest.raises(NotImplementedError):
        zonal_variance_oracle(get_testform("bump"), 10)
