"""Car-following case: Q-table library over the tabular decision process."""

from __future__ import annotations

import logging
from functools import cached_property
from typing import Any

from tslg.configs.case import CaseId
from tslg.core.evaluation import (
    Sampler,
    build_sampler,
    exhaustive_mdp_truth,
    ndd_sampler,
)
from tslg.core.exceptions import ConfigurationError
from tslg.core.ndd import EventBatch, mdp_exposure
from tslg.core.rl import (
    TabularMdp,
    backward_induction_q,
    build_car_following_mdp,
    estimate_p_s,
    normalization_constant,
    td_train,
)
from tslg.core.scenario import ExposureModel, Library, TreeLibrary, action_values

from .base import CasePipeline

logger = logging.getLogger(__name__)

TRAINING_METHODS = ("td", "backward")


class CarFollowingPipeline(CasePipeline):
    pipeline_name = CaseId.CAR_FOLLOWING

    @cached_property
    def surrogate_mdp(self) -> TabularMdp:
        return build_car_following_mdp(self.config, "idm")

    @cached_property
    def subject_mdp(self) -> TabularMdp:
        return build_car_following_mdp(self.config, self.subject_name)

    def exposure(self, events: EventBatch) -> ExposureModel:
        return mdp_exposure(events, self.space, action_values(self.config))

    def build_library(
        self, exposure: ExposureModel, seed: int, **options: Any
    ) -> TreeLibrary:
        """Train the criticality table (``method="td"`` or ``"backward"``)
        and estimate P(S) for the branch normalization."""
        method = options.get("method", "td")
        if method not in TRAINING_METHODS:
            raise ConfigurationError(f"unknown training method {method!r}")
        cfg = self.config.mdp
        mdp = self.surrogate_mdp
        if method == "td":
            q = td_train(
                mdp, exposure, cfg.alpha_lr, cfg.delta0, seed, max_sweeps=cfg.max_sweeps
            )
        else:
            q = backward_induction_q(mdp, exposure)
        p_s = estimate_p_s(mdp, exposure, cfg.p_s_episodes, seed)
        kappa = normalization_constant(q, mdp, exposure, p_s)
        library = TreeLibrary.from_arrays(
            self.pipeline_name,
            self.space,
            mdp.actions,
            mdp.horizon,
            q.q,
            mdp.zones,
            p_s,
            kappa,
        )
        logger.info(
            "Q-table library: %d states with collision mass, P(S)=%.3e.",
            library.size, p_s,
        )
        return library

    def library_sampler(self, library: Library, exposure: ExposureModel) -> Sampler:
        return build_sampler(
            library, exposure, self.config.sampling.epsilon, mdp=self.subject_mdp
        )

    def baseline_sampler(self, exposure: ExposureModel) -> Sampler:
        return ndd_sampler(exposure, self.subject_mdp)

    def ground_truth(self, exposure: ExposureModel, cap: int) -> float:
        return exhaustive_mdp_truth(self.subject_mdp, exposure, cap)
