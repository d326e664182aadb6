"""Two-term fit k Var = A0 + A1/k from variances at several k."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    A0_hat: float
    A1_hat: float
    residual_norm: float
    n_points: int

    def as_dict(self) -> dict:
        return {"A0_hat": self.A0_hat, "A1_hat": self.A1_hat, "residual_norm": self.residual_norm, "n_points": self.n_points}


def fit_expansion(data: Iterable[tuple[float, float]]) -> FitResult:
    """Weighted least squares of k Var against [1, 1/k] with weights k^2.

    The neglected term is A2/k^2 in k Var; weighting by k^2 equalises the
    size of that truncation across the ladder.
    """
    pts = [(float(k), float(v)) for k, v in data]
    ks = np.array([k for k, _ in pts])
    if len(np.unique(ks)) < 2:
        raise FitError("need at least 2 distinct k values")
    y = ks * np.array([v for _, v in pts])
    X = np.stack([np.ones_like(ks), 1.0 / ks], axis=1)
    sw = ks  # sqrt of weights k^2
    coef, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    resid = (X @ coef - y) * sw
    return FitResult(float(coef[0]), float(coef[1]), float(np.linalg.norm(resid)), len(pts))


def scaled_table(data: Iterable[tuple[float, float]]) -> list[tuple[int, float]]:
    """Plot-ready (k, k Var) rows."""
    return [(int(k), float(k) * float(v)) for k, v in data]
