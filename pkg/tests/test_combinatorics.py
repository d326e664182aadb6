from fractions import Fraction
import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerovar.geometry import fs_curvature
from zerovar.variance.combinatorics import (
    curvature_contraction,
    exponents_to_indices,
    moment_exponents,
    multinomial_expand,
    partitions_by_parts,
    power_coefficients,
    scalar_curvature_from_tensor,
    wick_moment,
    wick_moment_permanent,
)


def test_wick_examples():
    assert wick_moment(1, [1], [1]) == 1
    assert wick_moment(1, [1, 1], [1, 1]) == 2
    assert wick_moment(2, [1], [2]) == 0
    assert wick_moment(2, [1, 2], [2, 1]) == 1
    assert wick_moment(2, [1], [1, 1]) == 0
    assert wick_moment(3, [1, 1, 2], [2, 1, 1]) == 2


def test_wick_index_check():
    with pytest.raises(ValueError):
        wick_moment(2, [3], [3])


@given(
    st.lists(st.integers(1, 3), max_size=5),
    st.lists(st.integers(1, 3), max_size=5),
)
def test_wick_equals_permanent(up, bar):
    assert wick_moment(3, up, bar) == wick_moment_permanent(up, bar)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_curvature_contraction(m):
    curv = fs_curvature(m)
    rho = scalar_curvature_from_tensor(curv)
    assert rho == m * (m + 1) == curv.rho
    assert curvature_contraction(curv) == 2 * rho


def test_exponent_enumeration():
    e = moment_exponents(2, 3)
    assert len(e) == 35  # 4-tuples with sum <= 3
    up, bar = exponents_to_indices([2, 0, 1, 1], 2)
    assert up == [1, 1] and bar == [1, 2]


def test_multinomial_examples():
    assert multinomial_expand([1], 3, 4) == 3
    assert multinomial_expand([1, 2], 2, 5) == 4
    assert multinomial_expand([1], 1, 4) == 0
    assert multinomial_expand([1], 0, 2) == 0


def test_multinomial_exact_rational():
    C = [Fraction(1, 3), Fraction(-2, 7), Fraction(5, 2)]
    coeffs = power_coefficients(C, 5)
    for j in range(2, len(coeffs)):
        assert multinomial_expand(C, 5, j) == coeffs[j]


def test_multinomial_brute_force_grid():
    for p in range(2, 5):
        for C in itertools.product([-2, 1, 3], repeat=p - 1):
            for n in range(0, 7):
                coeffs = power_coefficients(list(C), n)
                for j in range(2, 13):
                    expected = coeffs[j] if j < len(coeffs) else 0
                    assert multinomial_expand(list(C), n, j) == expected


def test_partitions():
    assert sorted(partitions_by_parts(6, 3)) == sorted([(3, 0), (0, 2)])
    assert list(partitions_by_parts(5, 2)) == []


def test_multinomial_domain():
    with pytest.raises(ValueError):
        multinomial_expand([], 2, 2)
    with pytest.raises(ValueError):
        multinomial_expand([1], 2, 1)
