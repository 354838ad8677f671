"""Test campaigns: sample, run the subject, estimate, stop.

Tests are drawn in fixed-size batches.  Batch ``i`` uses its own stream
seeded from ``SeedSequence([seed, i])`` and batches are folded in index
order, so a campaign gives the same report for any number of workers.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from tslg.configs.case import CaseId, SamplingConfig
from tslg.core.exceptions import DomainError
from tslg.core.rl import TabularMdp
from tslg.core.scenario import ExposureModel
from tslg.infra.telemetry import (
    ATTR_CASE,
    ATTR_CONVERGED,
    ATTR_MODE,
    ATTR_TESTS,
    SPAN_EVAL_CAMPAIGN,
    tracer,
)

from .estimator import RunningEstimator
from .report import CampaignTrace, EvaluationReport
from .sampler import DrawBatch, Sampler, ndd_sampler

logger = logging.getLogger(__name__)

Subject = Callable[[np.ndarray], np.ndarray]
"""Accident indicator of the subject for an array of cell indices."""


def _simulate_batch(
    sampler: Sampler, subject: Subject | None, seed: int, index: int, size: int
) -> tuple[DrawBatch, np.ndarray]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    draws = sampler.draw(rng, size)
    if draws.event is not None:
        return draws, draws.event
    if subject is None:
        raise DomainError(f"sampler {sampler.sampler_name!r} needs a subject")
    return draws, np.asarray(subject(draws.cells), dtype=bool)


def run_campaign(
    sampler: Sampler,
    subject: Subject | None,
    sampling: SamplingConfig,
    *,
    case: CaseId,
    subject_name: str,
    seed: int,
    batch_size: int = 4096,
    workers: int = 1,
    mode: str = "library",
) -> EvaluationReport:
    """Run tests until the relative half-width drops to β.

    The rule is consulted from ``min_tests`` on.  With ``fixed_tests`` set
    exactly that many tests run.  Reaching ``max_tests`` first yields a
    report with ``converged=False``.
    """
    if workers < 1:
        raise DomainError(f"workers must be at least 1, got {workers}")
    if batch_size < 1:
        raise DomainError(f"batch size must be at least 1, got {batch_size}")
    fixed = sampling.fixed_tests
    limit = fixed if fixed is not None else sampling.max_tests
    estimator = RunningEstimator(sampling.confidence)

    parts: list[CampaignTrace] = []
    hits = explored = 0
    stopped = False
    last = (0.0, 0.0, float("inf"))
    index = tested = 0

    with (
        tracer.start_as_current_span(SPAN_EVAL_CAMPAIGN) as span,
        ThreadPoolExecutor(max_workers=workers) as pool,
    ):
        span.set_attribute(ATTR_CASE, case.value)
        span.set_attribute(ATTR_MODE, mode)
        while tested < limit and not stopped:
            wave = [
                pool.submit(
                    _simulate_batch, sampler, subject, seed, index + k, batch_size
                )
                for k in range(workers)
            ]
            index += workers
            for future in wave:
                if tested >= limit or stopped:
                    future.cancel()
                    continue
                draws, event = future.result()
                start = tested
                take = min(len(draws), limit - start)
                weight = draws.ratio[:take]
                indicator = event[:take]
                mu, var, hw = estimator.extend(weight * indicator)

                keep = take
                if fixed is None:
                    n = start + np.arange(1, take + 1)
                    rule = (n >= sampling.min_tests) & (hw <= sampling.beta)
                    done = np.flatnonzero(rule)
                    if done.size:
                        keep = int(done[0]) + 1
                        stopped = True
                last = (float(mu[keep - 1]), float(var[keep - 1]), float(hw[keep - 1]))
                hits += int(indicator[:keep].sum())
                explored += int(draws.explored[:keep].sum())
                parts.append(
                    CampaignTrace(
                        scenario_ids=tuple(draws.scenario_ids()[:keep]),
                        weight=weight[:keep],
                        indicator=indicator[:keep],
                        mu_hat=mu[:keep],
                        half_width=hw[:keep],
                    )
                )
                tested = start + keep
            logger.debug(
                "Campaign at %d tests: mu_hat=%.3e half-width=%.3g.",
                tested, last[0], last[2],
            )

        n = tested
        mu_hat, variance, half_width = last
        converged = stopped or (
            fixed is not None
            and n >= sampling.min_tests
            and half_width <= sampling.beta
        )
        span.set_attribute(ATTR_TESTS, n)
        span.set_attribute(ATTR_CONVERGED, converged)

    if fixed is None and not converged:
        logger.warning(
            "Campaign hit the %d-test cap before the half-width reached %.3g.",
            limit, sampling.beta,
        )
    logger.info(
        "%s campaign: %d tests, %d accidents, mu_hat=%.4e, half-width=%.3g.",
        mode, n, hits, mu_hat, half_width,
    )
    return EvaluationReport(
        case=case,
        mode=mode,
        subject=subject_name,
        seed=seed,
        n=n,
        hits=hits,
        mu_hat=mu_hat,
        variance=variance,
        half_width=half_width if np.isfinite(half_width) else None,
        converged=converged,
        fixed_tests=fixed,
        confidence=sampling.confidence,
        beta=sampling.beta,
        epsilon=sampling.epsilon if mode == "library" else None,
        batch_size=batch_size,
        explored=explored if mode == "library" else 0,
        trace=CampaignTrace.concat(parts),
    )


def naive_baseline(
    exposure: ExposureModel,
    subject: Subject | None,
    sampling: SamplingConfig,
    *,
    case: CaseId,
    subject_name: str,
    seed: int,
    mdp: TabularMdp | None = None,
    batch_size: int = 4096,
    workers: int = 1,
) -> EvaluationReport:
    """Naturalistic testing: scenarios straight from the exposure model
    (episodes on *mdp* for sequential cases), same stopping rule."""
    return run_campaign(
        ndd_sampler(exposure, mdp),
        subject,
        sampling,
        case=case,
        subject_name=subject_name,
        seed=seed,
        batch_size=batch_size,
        workers=workers,
        mode="ndd",
    )
