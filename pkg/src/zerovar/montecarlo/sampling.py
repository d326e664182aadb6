"""Standard Gaussian sections of O(k) in the orthonormal monomial basis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SectionSample:
    k: int
    coeffs: np.ndarray  # c_j, j = 0..k
    seed: int
    index: int

    def __post_init__(self) -> None:
        if self.coeffs.shape != (self.k + 1,):
            raise ValueError(f"expected {self.k + 1} coefficients, got {self.coeffs.shape}")


def philox_key(seed: int, index: int) -> int:
    """128-bit Philox key: low word the seed, high word the sample index."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    return (seed & _MASK64) | ((index & _MASK64) << 64)


def sample_coefficients(k: int, seed: int, index: int) -> np.ndarray:
    """k + 1 i.i.d. standard complex Gaussians, E|c|^2 = 1.

    Coefficient j consumes counter positions 2j, 2j+1 of the Philox stream
    keyed on (seed, index), so the value depends on (seed, index, j) only.
    Box-Muller: |c| = sqrt(-log(1 - u1)), arg c = 2 pi u2.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    gen = np.random.Generator(np.random.Philox(key=philox_key(seed, index)))
    u = gen.random((k + 1, 2))
    return np.sqrt(-np.log1p(-u[:, 0])) * np.exp(2j * np.pi * u[:, 1])


def sample_section(k: int, seed: int, index: int) -> SectionSample:
    return SectionSample(k, sample_coefficients(k, seed, index), seed, index)


def basis_weights(k: int) -> np.ndarray:
    """sqrt(binom(k, j)), proportional to the orthonormal basis weights.

    The common factor sqrt((k+1)/pi) does not move zeros and is dropped.
    """
    j = np.arange(k + 1)
    logc = gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1)
    return np.exp(0.5 * logc)


def section_polynomial(sample: SectionSample) -> np.ndarray:
    """Ascending coefficients a_j = c_j sqrt(binom(k, j)) of s in the chart z = h0/h1."""
    return sample.coeffs * basis_weights(sample.k)


def orthonormal_weights(k: int) -> np.ndarray:
    """Exact weights of S_j = w_j z^j, w_j = sqrt((k+1)!/(pi j! (k-j)!))."""
    return basis_weights(k) * math.sqrt((k + 1) / math.pi)
