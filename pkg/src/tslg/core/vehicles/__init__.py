from .ettc import ettc, ettc_array, mnp_ettc, np_ettc_array
from .followers import (
    AccAebFollower,
    Follower,
    IdmFollower,
    acc_aeb_accel,
    get_follower,
)
from .idm import desired_gap, idm_accel, idm_accel_array
from .mobil import mobil_utility
from .models import ActionBranch, Trajectory, VehicleState
from .simulate import (
    CutinOutcome,
    epoch_transition,
    rollout_cutin,
    simulate_episode,
    worst_case_collides,
)

__all__ = [
    "AccAebFollower",
    "ActionBranch",
    "CutinOutcome",
    "Follower",
    "IdmFollower",
    "Trajectory",
    "VehicleState",
    "acc_aeb_accel",
    "desired_gap",
    "epoch_transition",
    "ettc",
    "ettc_array",
    "get_follower",
    "idm_accel",
    "idm_accel_array",
    "mnp_ettc",
    "mobil_utility",
    "np_ettc_array",
    "rollout_cutin",
    "simulate_episode",
    "worst_case_collides",
]
