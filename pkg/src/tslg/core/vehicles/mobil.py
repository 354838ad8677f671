"""MOBIL lane-change incentive."""

from __future__ import annotations

from tslg.core.exceptions import DomainError


def mobil_utility(
    u_tilde: float,
    u: float,
    u_new_tilde: float,
    u_new: float,
    u_old_tilde: float,
    u_old: float,
    politeness: float,
) -> float:
    """Own acceleration gain plus *politeness* times the gains of the new
    and the old follower.  Tilded values are after the change."""
    if not 0.0 <= politeness <= 1.0:
        raise DomainError(f"politeness must lie in [0, 1], got {politeness!r}")
    return u_tilde - u + politeness * (u_new_tilde - u_new + u_old_tilde - u_old)
