"""Importance-sampling estimate and its relative half-width.

μ̂ is the mean of the weighted indicators P(x)/P̄(x)·A(x) and the stopping
quantity is the relative half-width z·σ̂/(√n·μ̂) of the normal confidence
interval, with σ̂ the sample standard deviation of the weighted terms.
"""

from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import norm

from tslg.core.exceptions import DomainError


class Estimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    mu_hat: float
    variance: float
    half_width: float


def z_value(confidence: float) -> float:
    """Two-sided normal quantile, 1.96 at 95 %."""
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence!r}")
    return float(norm.ppf(0.5 + confidence / 2.0))


def relative_half_width(mu_hat: float, variance: float, n: int, z: float) -> float:
    """Infinite while μ̂ = 0."""
    if n < 2 or not mu_hat > 0:
        return math.inf
    return z * math.sqrt(max(variance, 0.0) / n) / mu_hat


def estimate(terms: np.ndarray, confidence: float = 0.95) -> Estimate:
    terms = np.asarray(terms, dtype=np.float64)
    if terms.size < 2:
        raise DomainError("an estimate needs at least two tests")
    mu = float(terms.mean())
    var = float(terms.var(ddof=1))
    return Estimate(
        n=terms.size,
        mu_hat=mu,
        variance=var,
        half_width=relative_half_width(mu, var, terms.size, z_value(confidence)),
    )


class RunningEstimator:
    """Prefix statistics of a stream of weighted terms, fed in batches.

    ``extend`` returns μ̂, σ̂² and the half-width after every appended term.
    """

    def __init__(self, confidence: float) -> None:
        self.z = z_value(confidence)
        self.n = 0
        self._sum = 0.0
        self._sum_sq = 0.0

    @property
    def mu_hat(self) -> float:
        return self._sum / self.n if self.n else 0.0

    @property
    def variance(self) -> float:
        if self.n < 2:
            return 0.0
        return max((self._sum_sq - self._sum**2 / self.n) / (self.n - 1), 0.0)

    @property
    def half_width(self) -> float:
        return relative_half_width(self.mu_hat, self.variance, self.n, self.z)

    def extend(
        self, terms: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        terms = np.asarray(terms, dtype=np.float64)
        n = self.n + np.arange(1, terms.size + 1)
        s1 = self._sum + np.cumsum(terms)
        s2 = self._sum_sq + np.cumsum(terms * terms)
        mu = s1 / n
        with np.errstate(divide="ignore", invalid="ignore"):
            var = np.maximum((s2 - s1 * s1 / n) / (n - 1), 0.0)
            hw = self.z * np.sqrt(var / n) / mu
        var = np.where(n >= 2, var, 0.0)
        hw = np.where((n >= 2) & (mu > 0), hw, np.inf)
        if terms.size:
            self.n = int(n[-1])
            self._sum = float(s1[-1])
            self._sum_sq = float(s2[-1])
        return mu, var, hw
