"""Car-following decision process built from a follower model.

Between 1 s epochs the lead holds its acceleration and the follower reacts
every simulation step.  The next observed state is re-discretized by
nearest-cell rounding; ranges beyond the grid are safe, and states landing
in a terminal zone take that zone's code.
"""

from __future__ import annotations

import logging

import numpy as np

from tslg.configs.case import CaseConfig, CaseId
from tslg.core.exceptions import ConfigurationError
from tslg.core.scenario import action_values, build_space
from tslg.core.vehicles import epoch_transition, get_follower

from .mdp import COLLISION, SAFE, TabularMdp, terminal_rows
from .zones import classify_zones

logger = logging.getLogger(__name__)


def build_car_following_mdp(config: CaseConfig, follower: str = "idm") -> TabularMdp:
    """Decision process of *follower* (the surrogate by default) on the
    case's state and action grids."""
    if config.case is not CaseId.CAR_FOLLOWING:
        raise ConfigurationError(f"case {config.case} is not a car-following case")
    space = build_space(config)
    actions = action_values(config)
    model = get_follower(follower, config)
    zones = classify_zones(space, model, config)
    mdp = TabularMdp(
        space=space,
        actions=actions,
        next_state=terminal_rows(zones, len(actions)),
        zones=zones,
        horizon=config.mdp.horizon,
    )
    dangerous = mdp.dangerous
    if not dangerous.size:
        logger.warning("The %s follower has no dangerous states.", follower)
        return mdp

    values = space.all_values()[dangerous]
    states = np.repeat(values, len(actions), axis=0)
    accel = np.tile(actions, len(dangerous))
    nxt, collided = epoch_transition(states, accel, model, config)

    r_max = space.dims[space.dim_index("range")].upper
    beyond = nxt[:, space.dim_index("range")] > r_max
    codes = mdp.terminal_code(space.snap(nxt))
    codes = np.where(beyond, SAFE, codes)
    codes = np.where(collided, COLLISION, codes)

    table = np.array(mdp.next_state)
    table[dangerous] = codes.reshape(len(dangerous), len(actions))
    logger.info(
        "Built %s transitions for %d dangerous states x %d actions.",
        follower, len(dangerous), len(actions),
    )
    return TabularMdp(
        space=space,
        actions=actions,
        next_state=table,
        zones=zones,
        horizon=config.mdp.horizon,
    )
