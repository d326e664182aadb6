import math

import numpy as np
import pytest

from zerovar.montecarlo import SectionSample, sample_section
from zerovar.montecarlo.sampling import (
    basis_weights,
    orthonormal_weights,
    philox_key,
    sample_coefficients,
    section_polynomial,
)


def test_deterministic_by_index():
    a = sample_coefficients(10, 5, 17)
    assert np.array_equal(a, sample_coefficients(10, 5, 17))
    assert not np.array_equal(a, sample_coefficients(10, 5, 18))
    assert not np.array_equal(a, sample_coefficients(10, 6, 17))


def test_sample_order_does_not_matter():
    forward = [sample_coefficients(4, 1, i) for i in range(5)]
    backward = [sample_coefficients(4, 1, i) for i in reversed(range(5))][::-1]
    for x, y in zip(forward, backward):
        assert np.array_equal(x, y)


def test_key_layout():
    assert philox_key(3, 0) == 3
    assert philox_key(3, 1) == 3 + 2**64
    with pytest.raises(ValueError):
        philox_key(-1, 0)


def test_standard_complex_gaussian():
    n = 50_000
    c = np.concatenate([sample_coefficients(1, 11, i) for i in range(n)])
    m = c.size
    # E|c|^2 = 1 with Var|c|^2 = 1; E c^2 = 0 with E|c^2|^2 = 2
    assert abs(np.mean(np.abs(c) ** 2) - 1) < 5 / math.sqrt(m)
    assert abs(np.mean(c**2)) < 5 * math.sqrt(2 / m)
    assert abs(np.mean(c)) < 5 / math.sqrt(m)


def test_gram_matrix_is_identity():
    n = 20_000
    c = np.stack([sample_coefficients(3, 2, i) for i in range(n)])
    gram = c.T @ c.conj() / n
    assert np.max(np.abs(gram - np.eye(4))) < 5 * math.sqrt(2 / n)


def test_basis_weights():
    w = basis_weights(4)
    assert np.allclose(w**2, [1, 4, 6, 4, 1])
    big = basis_weights(2000)
    assert np.all(np.isfinite(big)) and big[1000] > 1e290
    assert np.allclose(orthonormal_weights(4) ** 2 * math.pi / 5, [1, 4, 6, 4, 1])


def test_section_polynomial():
    s = sample_section(4, 0, 0)
    assert np.allclose(section_polynomial(s), s.coeffs * basis_weights(4))


def test_sample_validation():
    with pytest.raises(ValueError):
        SectionSample(3, np.zeros(2, dtype=complex), 0, 0)
