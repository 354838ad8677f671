from .backward import backward_induction_q
from .car_following import build_car_following_mdp
from .criticality import (
    branch_criticality,
    estimate_p_s,
    follow_branch,
    normalization_constant,
    posterior_action,
    posterior_initial,
    rollout_naturalistic,
    sample_actions,
    state_collision_prob,
)
from .mdp import COLLISION, SAFE, TabularMdp, terminal_rows
from .td import QTable, td_targets, td_train
from .zones import classify_zones

__all__ = [
    "COLLISION",
    "SAFE",
    "QTable",
    "TabularMdp",
    "backward_induction_q",
    "branch_criticality",
    "build_car_following_mdp",
    "classify_zones",
    "estimate_p_s",
    "follow_branch",
    "normalization_constant",
    "posterior_action",
    "posterior_initial",
    "rollout_naturalistic",
    "sample_actions",
    "state_collision_prob",
    "td_targets",
    "td_train",
    "terminal_rows",
]
