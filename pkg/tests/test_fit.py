import pytest

from zerovar.variance import FitError, fit_expansion
from zerovar.variance.fit import scaled_table

KS = [100, 150, 200, 300, 400]


def test_exact_model():
    fit = fit_expansion([(k, 3 / k - 5 / k**2) for k in KS])
    assert fit.A0_hat == pytest.approx(3, abs=1e-10)
    assert fit.A1_hat == pytest.approx(-5, abs=1e-10)
    assert fit.residual_norm < 1e-10


def test_model_with_third_term():
    fit = fit_expansion([(k, 3 / k - 5 / k**2 + 7 / k**3) for k in KS])
    assert abs(fit.A0_hat - 3) < 1e-3
    assert abs(fit.A1_hat + 5) < 0.3


def test_two_points_is_enough():
    fit = fit_expansion([(10, 1 / 10 + 2 / 100), (20, 1 / 20 + 2 / 400)])
    assert fit.A0_hat == pytest.approx(1) and fit.A1_hat == pytest.approx(2)


def test_singular_design():
    with pytest.raises(FitError):
        fit_expansion([(100, 0.01), (100, 0.0101)])
    with pytest.raises(FitError):
        fit_expansion([])


def test_table():
    assert scaled_table([(10, 0.5)]) == [(10, 5.0)]
