"""Linear statistics of zero sets and their empirical variance."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..geometry import TestForm
from ..specfun import riemann_zeta
from .roots import RootFindingError, ZeroSet, zeros_of_section
from .sampling import sample_section

log = logging.getLogger(__name__)

MAX_REJECTION_RATE = 1e-3


class RejectionError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    variance: float
    stderr_mean: float
    stderr_variance: float
    n_samples: int
    seed: int
    n_rejected: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError("variance must be nonnegative")

    def as_dict(self) -> dict:
        return asdict(self)


def linear_statistic(zs: ZeroSet, tf: TestForm) -> float:
    """(Z_s, psi) = sum of psi over the zeros."""
    return float(np.sum(tf.psi(zs.h0, zs.h1)))


def summarize(values: np.ndarray, seed: int, n_rejected: int = 0, extras: dict | None = None) -> MCEstimate:
    """Mean, unbiased variance, and standard errors; the variance error uses
    the empirical fourth central moment, Var(S^2) ~ (mu4 - S^4)/N."""
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least 2 samples")
    mean = math.fsum(x) / n
    dev = x - mean
    s2 = math.fsum(dev * dev) / (n - 1)
    mu4 = math.fsum(dev**4) / n
    se_var = math.sqrt(max(mu4 - s2 * s2, 0.0) / n)
    return MCEstimate(mean, s2, math.sqrt(s2 / n), se_var, n, seed, n_rejected, extras or {})


def sample_statistics(
    k: int,
    statistic: Callable[[ZeroSet], float],
    n_samples: int,
    seed: int,
) -> tuple[np.ndarray, int]:
    """statistic over sample indices 0, 1, ...; a rejected index is skipped
    and replaced by the next unused one, so accepted samples stay keyed."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    out = np.empty(n_samples)
    budget = max(1, int(MAX_REJECTION_RATE * n_samples))
    rejected = 0
    index = 0
    filled = 0
    while filled < n_samples:
        try:
            zs = zeros_of_section(sample_section(k, seed, index))
        except RootFindingError as exc:
            rejected += 1
            log.warning("sample %d rejected: %s", index, exc)
            if rejected > budget:
                raise RejectionError(
                    f"rejection rate above {MAX_REJECTION_RATE}",
                    {"k": k, "seed": seed, "rejected": rejected, "attempted": index + 1},
                ) from exc
        else:
            out[filled] = statistic(zs)
            filled += 1
        index += 1
    return out, rejected


def mc_variance(k: int, tf: TestForm, n_samples: int, seed: int) -> MCEstimate:
    values, rejected = sample_statistics(k, lambda zs: linear_statistic(zs, tf), n_samples, seed)
    return summarize(values, seed, rejected, {"k": k, "testform": tf.name})


def disk_count(zs: ZeroSet, radius: float) -> int:
    """Number of zeros within geodesic distance radius of [0:1]."""
    d = np.arctan2(np.abs(zs.h0), np.abs(zs.h1))
    return int(np.count_nonzero(d < radius))


def number_variance_theory(k: int, radius: float) -> dict:
    """Mean (k/pi) Area(U) and the leading variance zeta(3/2)/(8 pi^{3/2}) Length(dU) sqrt(k)."""
    area = math.pi * math.sin(radius) ** 2
    length = math.pi * math.sin(2.0 * radius)
    coef = riemann_zeta(1.5) / (8.0 * math.pi**1.5)
    return {
        "mean": k * area / math.pi,
        "area": area,
        "length": length,
        "variance": coef * length * math.sqrt(k),
    }


def mc_number_variance(k: int, radius: float, n_samples: int, seed: int) -> MCEstimate:
    if not 0.0 < radius < math.pi / 2:
        raise ValueError("radius must lie in (0, pi/2)")
    values, rejected = sample_statistics(k, lambda zs: disk_count(zs, radius), n_samples, seed)
    theory = number_variance_theory(k, radius)
    est = summarize(values, seed, rejected)
    extras = {
        "k": k,
        "radius": radius,
        "theory_mean": theory["mean"],
        "theory_variance": theory["variance"],
        "ratio": est.variance / theory["variance"] if theory["variance"] > 0 else math.nan,
        "variance_over_sqrt_k": est.variance / math.sqrt(k),
    }
    return MCEstimate(est.mean, est.variance, est.stderr_mean, est.stderr_variance, est.n_samples, seed, rejected, extras)
