import math

import pytest

from zerovar.geometry import get_testform
from zerovar.specfun import riemann_zeta
from zerovar.variance import (
    AsymptoticCoefficients,
    CoefficientIntegrals,
    asymptotic_coefficients,
    asymptotic_variance,
    coefficient_integrals,
    exact_variance,
)
from zerovar.variance.asymptotics import dbar_norm_fd, integral_of_f, riemann_surface_coefficients

A0_PSI1 = 4 * riemann_zeta(3) / 3
A1_PSI1 = -4 * riemann_zeta(4)  # = -2 pi^4 / 45


def test_psi1_integrals():
    ci = coefficient_integrals(get_testform("psi1"))
    assert ci.I_ff == pytest.approx(16 * math.pi / 3, rel=1e-12)
    assert ci.I_rff == pytest.approx(32 * math.pi / 3, rel=1e-12)
    # |dbar f|^2 Omega = |f_zbar|^2 dx dy; for lambda = 8 this is 2 I_ff
    assert ci.I_dbarf == pytest.approx(32 * math.pi / 3, rel=1e-12)


@pytest.mark.parametrize("name", ["psi1", "psi2", "zonal2"])
def test_dbar_eigen_vs_finite_differences(name):
    tf = get_testform(name)
    eig = coefficient_integrals(tf, "eigen").I_dbarf
    assert dbar_norm_fd(tf) == pytest.approx(eig, rel=1e-6)


def test_bump_uses_finite_differences():
    ci = coefficient_integrals(get_testform("bump"))
    assert ci.dbar_method == "fd"
    assert ci.I_dbarf > 0
    with pytest.raises(ValueError):
        coefficient_integrals(get_testform("bump"), "eigen")


def test_psi1_coefficients():
    c = asymptotic_coefficients(1, coefficient_integrals(get_testform("psi1")))
    assert c.A0 == pytest.approx(A0_PSI1, rel=1e-12)
    assert c.A0 == pytest.approx(1.602742, abs=1e-6)
    assert c.A1 == pytest.approx(A1_PSI1, rel=1e-12)


def test_riemann_surface_form_agrees():
    # Delta psi = 2 f: ||Delta psi||^2 = 4 I_ff, ||d Delta psi||^2 = lambda ||Delta psi||^2
    ci = coefficient_integrals(get_testform("psi1"))
    lap2 = 4 * ci.I_ff
    a0, a1 = riemann_surface_coefficients(lap2, 2 * lap2, 8 * lap2)
    c = asymptotic_coefficients(1, ci)
    assert a0 == pytest.approx(c.A0, rel=1e-12)
    assert a1 == pytest.approx(c.A1, rel=1e-12)


def test_zero_form():
    ci = coefficient_integrals(get_testform("one"))
    c = asymptotic_coefficients(1, ci)
    assert c.A0 == 0 and c.A1 == 0


def test_general_m_formula():
    ci = CoefficientIntegrals(1.0, 2.0, 3.0)
    c = asymptotic_coefficients(2, ci)
    assert c.A0 == pytest.approx(riemann_zeta(4) / 4)
    assert c.A1 == pytest.approx(-riemann_zeta(5) * (2 / 8 + 3 / 4))
    with pytest.raises(ValueError):
        asymptotic_coefficients(0, ci)
    with pytest.raises(ValueError):
        AsymptoticCoefficients(-1.0, 0.0, 1, ci)


def test_f_has_zero_mean():
    for name in ("psi1", "bump", "zonal2"):
        assert abs(integral_of_f(get_testform(name))) < 1e-8


def test_two_term_prediction_improves():
    # |k Var - A0 - A1/k| should fall at least like k^-3/2
    tf = get_testform("psi1")
    c = asymptotic_coefficients(1, coefficient_integrals(tf))
    errs = [abs(k * exact_variance(tf, k).value - c.A0 - c.A1 / k) for k in (50, 100, 200)]
    assert errs[1] / errs[0] < 2**-1.5 * 1.1
    assert errs[2] / errs[1] < 2**-1.5 * 1.1


def test_asymptotic_route_result():
    vr = asymptotic_variance(get_testform("psi1"), 100)
    assert vr.route == "asymptotic"
    assert vr.value == pytest.approx((A0_PSI1 + A1_PSI1 / 100) / 100, rel=1e-12)
    assert not vr.flagged
    small = asymptotic_variance(get_testform("psi1"), 2)
    assert small.flagged  # A0 + A1/2 < 0
