"""Criticality and the library threshold."""

from __future__ import annotations

import numpy as np

from tslg.core.exceptions import DomainError
from tslg.core.scenario import ScenarioSpace


def criticality(sm_event: np.ndarray | bool, exposure: np.ndarray | float):
    """V = P(S|x)·P(x) for a deterministic surrogate (event is 0 or 1)."""
    v = np.asarray(sm_event, dtype=np.float64) * np.asarray(exposure, dtype=np.float64)
    return float(v) if np.ndim(v) == 0 else v


def gamma_threshold(m: float, space: ScenarioSpace, library_size: int = 0) -> float:
    """γ = m / N(X).

    *library_size* is accepted for the exact form m / (N(X) − N(Φ)) but the
    approximation drops it while N(Φ) ≪ N(X); it is only checked.
    """
    if m < 1:
        raise DomainError(f"exploration constant must be at least 1, got {m!r}")
    n = space.total_count
    if n == 0:
        raise DomainError("empty scenario space")
    if not 0 <= library_size < n:
        raise DomainError(f"library size {library_size} outside [0, {n})")
    return m / n
