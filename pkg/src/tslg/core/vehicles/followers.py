"""Follower models: the surrogate IDM and the ACC+AEB subject under test.

Followers share one vectorized call signature so the simulators can batch
whole grids through either model.
"""

from __future__ import annotations

from abc import abstractmethod
from typing import Protocol

import numpy as np

from tslg.configs.case import AccAebParams, CaseConfig, IdmParams
from tslg.core.exceptions import ConfigurationError

from .ettc import ettc_array
from .idm import idm_accel_array
from .models import VehicleState


class Follower(Protocol):
    """Anything that maps follower/lead observations to an acceleration."""

    model_name: str

    @property
    @abstractmethod
    def bounds(self) -> IdmParams:
        """Speed and acceleration box of the follower."""

    @abstractmethod
    def accel(
        self,
        speed: np.ndarray,
        prev_accel: np.ndarray,
        r: np.ndarray,
        r_dot: np.ndarray,
        lead_accel: np.ndarray,
    ) -> np.ndarray: ...


class IdmFollower(Follower):
    model_name = "idm"

    def __init__(self, params: IdmParams) -> None:
        self._params = params

    @property
    def bounds(self) -> IdmParams:
        return self._params

    def accel(self, speed, prev_accel, r, r_dot, lead_accel):
        return idm_accel_array(speed, r, r_dot, self._params)


class AccAebFollower(Follower):
    """IDM-family cruise control overridden by full braking when the ETTC
    (relative acceleration from the lead's and the follower's last command)
    drops strictly below the trigger."""

    model_name = "acc_aeb"

    def __init__(self, params: AccAebParams) -> None:
        self._params = params

    @property
    def bounds(self) -> IdmParams:
        return self._params.acc

    def accel(self, speed, prev_accel, r, r_dot, lead_accel):
        acc = self._params.acc
        cruise = idm_accel_array(speed, r, r_dot, acc)
        ttc = ettc_array(
            np.maximum(r, 1e-9), r_dot, np.asarray(lead_accel) - np.asarray(prev_accel)
        )
        brake = ~np.isnan(ttc) & (ttc < self._params.aeb_ttc)
        return np.where(brake, acc.a_min, cruise)


def acc_aeb_accel(
    ego: VehicleState,
    r: float,
    r_dot: float,
    params: AccAebParams,
    lead_accel: float = 0.0,
) -> float:
    follower = AccAebFollower(params)
    return float(
        follower.accel(
            np.float64(ego.velocity),
            np.float64(ego.acceleration),
            np.float64(r),
            np.float64(r_dot),
            np.float64(lead_accel),
        )
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_KNOWN_FOLLOWERS = (IdmFollower.model_name, AccAebFollower.model_name)


def get_follower(name: str, config: CaseConfig) -> Follower:
    """Follower *name* parameterized from *config*."""
    if name == IdmFollower.model_name:
        return IdmFollower(config.surrogate)
    if name == AccAebFollower.model_name:
        return AccAebFollower(config.subject)
    raise ConfigurationError(
        f"unknown follower model {name!r}; "
        f"expected one of {', '.join(_KNOWN_FOLLOWERS)}"
    )
