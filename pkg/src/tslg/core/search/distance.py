"""Normalized distance between scenarios and the common set."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from tslg.core.exceptions import DomainError
from tslg.core.ndd import CommonSet


def factor_vector(omega: CommonSet, factors: Mapping[str, float]) -> np.ndarray:
    try:
        out = np.array([factors[name] for name in omega.names], dtype=np.float64)
    except KeyError as exc:
        raise DomainError(
            f"no normalization factor for dimension {exc.args[0]!r}"
        ) from exc
    if (out <= 0).any():
        raise DomainError("normalization factors must be positive")
    return out


def distance_to_common_set(
    values: np.ndarray, omega: CommonSet, factors: Mapping[str, float]
) -> np.ndarray | float:
    """Root-mean-square of the per-dimension distances to Ω divided by their
    factors.  For a box the nearest member is the per-dimension clamp, so
    the distance is exact."""
    scaled = omega.distances(values) / factor_vector(omega, factors)
    d = np.sqrt(np.mean(scaled**2, axis=-1))
    return float(d) if np.ndim(d) == 0 else d
