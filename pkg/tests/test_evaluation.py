"""Tests for samplers, the estimator, test campaigns and the oracles."""

import math

import numpy as np
import pytest

from tslg.configs.case import CaseId, DimensionSpec, SamplingConfig
from tslg.core.evaluation import (
    GridSampler,
    RunningEstimator,
    TreeSampler,
    acceleration_ratio,
    build_sampler,
    estimate,
    exhaustive_mdp_truth,
    exhaustive_truth,
    grid_sampling_mass,
    naive_baseline,
    ndd_sampler,
    run_campaign,
    sample_scenario,
    tree_sampling_mass,
    z_value,
)
from tslg.core.exceptions import (
    DomainError,
    EmptyLibraryError,
    LibraryMismatchError,
    OracleRefusedError,
)
from tslg.core.rl import COLLISION, SAFE, TabularMdp, backward_induction_q
from tslg.core.scenario import (
    ZONE_COLLISION,
    ZONE_DANGEROUS,
    ZONE_SAFE,
    ExposureModel,
    GridLibrary,
    ScenarioSpace,
    TreeLibrary,
    uniform_exposure,
)

_LINE = ScenarioSpace(
    dims=(DimensionSpec(name="x", lower=0.0, upper=9.0, step=1.0),)
)
_ACCIDENTS = {2, 5, 7}


def _subject(cells: np.ndarray) -> np.ndarray:
    return np.isin(cells, list(_ACCIDENTS))


def _make_library(cells=(2, 5), values=(0.3, 0.1)) -> GridLibrary:
    return GridLibrary.from_values(
        CaseId.CUTIN, _LINE, 0.01, np.array(cells), np.array(values)
    )


def _make_covering_library() -> GridLibrary:
    return _make_library(cells=sorted(_ACCIDENTS), values=[0.1] * 3)


def _make_sampling(**changes) -> SamplingConfig:
    return SamplingConfig(**({"epsilon": 0.05, "beta": 0.3} | changes))


_TOY_SPACE = ScenarioSpace(
    dims=(DimensionSpec(name="range", lower=0.0, upper=3.0, step=1.0),)
)
_TOY_Q = np.array([[0.0, 0.0], [0.5, 1 / 6], [1 / 3, 0.0], [0.0, 0.0]])
_TOY_ZONES = np.array([ZONE_COLLISION, ZONE_DANGEROUS, ZONE_DANGEROUS, ZONE_SAFE])


def _make_toy_mdp() -> TabularMdp:
    return TabularMdp(
        space=_TOY_SPACE,
        actions=np.array([-1.0, 1.0]),
        next_state=np.array(
            [[COLLISION, COLLISION], [COLLISION, 2], [1, SAFE], [SAFE, SAFE]]
        ),
        zones=_TOY_ZONES,
        horizon=30,
    )


def _make_toy_exposure() -> ExposureModel:
    return ExposureModel(
        space=_TOY_SPACE,
        mass=np.array([0.1, 0.4, 0.4, 0.1]),
        kind="mdp",
        actions=np.array([-1.0, 1.0]),
        action_mass=np.full((4, 2), 0.5),
    )


def _make_tree_library() -> TreeLibrary:
    return TreeLibrary.from_arrays(
        CaseId.CAR_FOLLOWING, _TOY_SPACE, np.array([-1.0, 1.0]), 30,
        _TOY_Q, _TOY_ZONES, p_s=0.5, normalization=1.0,
    )


class TestGridSampling:
    def test_mixture_masses(self):
        mass = grid_sampling_mass(_make_library(), epsilon=0.05)

        assert mass[2] == pytest.approx(0.7125)
        assert mass[5] == pytest.approx(0.2375)
        assert mass[0] == pytest.approx(0.00625)
        assert mass.sum() == pytest.approx(1.0)

    def test_library_covering_the_space(self):
        library = _make_library(cells=range(10), values=[0.1] * 10)

        mass = grid_sampling_mass(library, epsilon=0.05)

        np.testing.assert_allclose(mass, np.full(10, 0.1))

    def test_empty_library(self):
        library = _make_library(cells=[], values=[])

        with pytest.raises(EmptyLibraryError):
            grid_sampling_mass(library, epsilon=0.05)

    def test_ratio_and_exploration_flags(self):
        sampler = build_sampler(_make_library(), uniform_exposure(_LINE), 0.05)

        batch = sampler.draw(np.random.default_rng(1), 2000)

        in_library = np.isin(batch.cells, [2, 5])
        np.testing.assert_array_equal(batch.explored, ~in_library)
        np.testing.assert_allclose(batch.ratio[batch.cells == 2], 0.1 / 0.7125)
        np.testing.assert_allclose(batch.ratio[batch.cells == 0], 0.1 / 0.00625)

    def test_weighted_indicator_is_unbiased(self):
        sampler = build_sampler(_make_library(), uniform_exposure(_LINE), 0.05)

        batch = sampler.draw(np.random.default_rng(7), 200_000)
        terms = batch.ratio * _subject(batch.cells)

        assert terms.mean() == pytest.approx(0.3, abs=0.01)

    def test_scenario_draw(self):
        sampler = ndd_sampler(uniform_exposure(_LINE))

        draw = sample_scenario(sampler, np.random.default_rng(1))

        assert draw.ratio == pytest.approx(1.0)
        assert draw.scenario_id == str(draw.cell)
        assert draw.event is None

    @pytest.mark.parametrize("epsilon", [0.0, 1.0])
    def test_epsilon_range(self, epsilon):
        with pytest.raises(DomainError, match="epsilon"):
            build_sampler(_make_library(), uniform_exposure(_LINE), epsilon)

    def test_grid_mismatch(self):
        other = ScenarioSpace(
            dims=(DimensionSpec(name="x", lower=0.0, upper=4.0, step=1.0),)
        )

        with pytest.raises(LibraryMismatchError):
            build_sampler(_make_library(), uniform_exposure(other), 0.05)

    def test_million_draws_match_sampling_masses(self):
        sampler = build_sampler(_make_library(), uniform_exposure(_LINE), 0.05)
        n = 1_000_000

        batch = sampler.draw(np.random.default_rng(13), n)
        counts = np.bincount(batch.cells, minlength=10)
        # library cells, then the explored cells pooled
        observed = np.array([counts[2], counts[5], n - counts[2] - counts[5]])
        p = np.array([0.7125, 0.2375, 0.05])
        sigma = np.sqrt(n * p * (1 - p))

        assert abs(sampler.mass.sum() - 1.0) <= 1e-12
        assert (np.abs(observed - n * p) <= 3 * sigma).all()
        assert abs(batch.ratio.mean() - 1.0) <= 3 * batch.ratio.std() / math.sqrt(n)

    def test_sampler_mass_must_be_normalized(self):
        with pytest.raises(DomainError, match="sum to"):
            GridSampler(uniform_exposure(_LINE), np.full(10, 0.2))


class TestTreeSampling:
    def test_mixed_root_and_action_masses(self):
        root, actions = tree_sampling_mass(
            _make_tree_library(), _make_toy_exposure(), epsilon=0.1
        )

        np.testing.assert_allclose(
            root, 0.9 * np.array([0.0, 2 / 3, 1 / 3, 0.0]) + 0.1 / 4
        )
        np.testing.assert_allclose(actions[1], 0.9 * np.array([0.75, 0.25]) + 0.05)
        np.testing.assert_allclose(actions[3], [0.5, 0.5])

    def test_needs_decision_process(self):
        with pytest.raises(DomainError, match="decision process"):
            build_sampler(_make_tree_library(), _make_toy_exposure(), 0.1)

    def test_draws_carry_events_and_actions(self):
        sampler = build_sampler(
            _make_tree_library(), _make_toy_exposure(), 0.1, mdp=_make_toy_mdp()
        )

        batch = sampler.draw(np.random.default_rng(2), 500)

        assert isinstance(sampler, TreeSampler)
        assert batch.event is not None
        assert batch.actions.shape == (500, 30)
        np.testing.assert_array_equal(batch.event[batch.cells == 0], True)
        np.testing.assert_array_equal(batch.event[batch.cells == 3], False)
        ids = batch.scenario_ids()
        for i in (0, int(np.argmax(batch.cells == 0))):
            assert batch.draw(i).scenario_id == ids[i]

    def test_ratios_match_enumerated_branch_probabilities(self):
        # 1 --u0--> collision, 1 --u1--> 2, 2 --u0--> collision, 2 --u1--> safe
        mdp = TabularMdp(
            space=_TOY_SPACE,
            actions=np.array([-1.0, 1.0]),
            next_state=np.array(
                [[COLLISION, COLLISION], [COLLISION, 2], [COLLISION, SAFE],
                 [SAFE, SAFE]]
            ),
            zones=_TOY_ZONES,
            horizon=30,
        )
        exposure = ExposureModel(
            space=_TOY_SPACE,
            mass=np.array([0.1, 0.4, 0.4, 0.1]),
            kind="mdp",
            actions=np.array([-1.0, 1.0]),
            action_mass=np.tile([0.3, 0.7], (4, 1)),
        )
        q = backward_induction_q(mdp, exposure).q
        library = TreeLibrary.from_arrays(
            CaseId.CAR_FOLLOWING, _TOY_SPACE, mdp.actions, 30, q, _TOY_ZONES,
            p_s=0.1 + 0.4 * 0.51 + 0.4 * 0.3, normalization=1.0,
        )
        root_mass, action_mass = tree_sampling_mass(library, exposure, epsilon=0.1)
        branches: dict[tuple[int, tuple[int, ...]], tuple[float, float]] = {}

        def enumerate_from(root, state, taken, p, p_bar):
            for u in range(2):
                nxt = int(mdp.next_state[state, u])
                step = (p * exposure.action_mass[state, u],
                        p_bar * action_mass[state, u])
                if nxt < 0:
                    branches[root, (*taken, u)] = step
                else:
                    enumerate_from(root, nxt, (*taken, u), *step)

        for root in range(4):
            if _TOY_ZONES[root] == ZONE_DANGEROUS:
                enumerate_from(root, root, (), exposure.mass[root], root_mass[root])
            else:
                branches[root, ()] = (exposure.mass[root], root_mass[root])

        sampler = build_sampler(library, exposure, 0.1, mdp=mdp)
        batch = sampler.draw(np.random.default_rng(8), 5000)

        assert sum(p for p, _ in branches.values()) == pytest.approx(1.0, abs=1e-12)
        assert sum(p_bar for _, p_bar in branches.values()) == pytest.approx(1.0)
        for root, row, ratio in zip(batch.cells, batch.actions, batch.ratio,
                                    strict=True):
            p, p_bar = branches[int(root), tuple(int(u) for u in row[row >= 0])]
            assert ratio == pytest.approx(p / p_bar, rel=1e-12)

    def test_library_estimate_matches_exact_rate(self):
        mdp, exposure = _make_toy_mdp(), _make_toy_exposure()
        sampler = build_sampler(_make_tree_library(), exposure, 0.1, mdp=mdp)
        truth = exhaustive_mdp_truth(mdp, exposure, cap=100)

        batch = sampler.draw(np.random.default_rng(5), 100_000)

        assert truth == pytest.approx(0.5, abs=1e-6)
        assert (batch.ratio * batch.event).mean() == pytest.approx(truth, abs=0.01)


class TestEstimator:
    def test_two_tests(self):
        result = estimate(np.array([0.2, 0.0]))

        assert result.mu_hat == pytest.approx(0.1)
        assert result.variance == pytest.approx(0.02)
        assert result.half_width == pytest.approx(z_value(0.95))

    def test_constant_terms_have_zero_half_width(self):
        assert estimate(np.full(10, 0.3)).half_width == pytest.approx(0.0, abs=1e-12)

    def test_zero_mean_is_infinite(self):
        assert math.isinf(estimate(np.zeros(5)).half_width)

    def test_single_test_rejected(self):
        with pytest.raises(DomainError, match="at least two"):
            estimate(np.array([1.0]))

    def test_z_value(self):
        assert z_value(0.95) == pytest.approx(1.959964, rel=1e-6)
        with pytest.raises(DomainError):
            z_value(1.0)

    def test_running_matches_batch(self):
        terms = np.random.default_rng(4).random(100)
        running = RunningEstimator(0.95)

        running.extend(terms[:30])
        mu, var, hw = running.extend(terms[30:])
        final = estimate(terms)

        assert mu[-1] == pytest.approx(final.mu_hat)
        assert var[-1] == pytest.approx(final.variance)
        assert hw[-1] == pytest.approx(final.half_width)
        assert running.n == 100

    def test_first_prefix_is_infinite(self):
        mu, var, hw = RunningEstimator(0.95).extend(np.array([1.0, 1.0]))

        assert math.isinf(hw[0])
        assert var[0] == 0.0
        assert hw[1] == 0.0


class TestCampaign:
    def _run(self, sampling: SamplingConfig, library=None, **kwargs):
        if library is None:
            library = _make_covering_library()
        sampler = build_sampler(library, uniform_exposure(_LINE), 0.05)
        return run_campaign(
            sampler, _subject, sampling,
            case=CaseId.CUTIN, subject_name="toy", seed=11, **kwargs,
        )

    def test_same_report_for_any_worker_count(self):
        sampling = _make_sampling(beta=0.05)

        one = self._run(sampling, batch_size=64, workers=1)
        three = self._run(sampling, batch_size=64, workers=3)

        assert one.model_dump() == three.model_dump()
        assert list(one.trace.rows()) == list(three.trace.rows())

    def test_stops_at_first_test_meeting_the_rule(self):
        sampling = _make_sampling(min_tests=30)
        sampler = ndd_sampler(uniform_exposure(_LINE))

        report = run_campaign(
            sampler, lambda cells: np.ones(len(cells), dtype=bool), sampling,
            case=CaseId.CUTIN, subject_name="always", seed=1, mode="ndd",
        )

        assert report.n == 30
        assert report.converged
        assert report.mu_hat == pytest.approx(1.0)
        assert report.epsilon is None

    def test_cap_reports_not_converged(self):
        report = self._run(
            _make_sampling(beta=1e-4, max_tests=100), _make_library(), batch_size=32
        )

        assert report.n == 100
        assert not report.converged
        assert len(report.trace) == 100

    def test_fixed_tests_ignore_the_rule(self):
        report = self._run(_make_sampling(fixed_tests=50), batch_size=16)

        assert report.n == 50
        assert report.fixed_tests == 50
        assert [row[0] for row in report.trace.rows()] == list(range(1, 51))

    def test_estimate_close_to_truth(self):
        report = self._run(_make_sampling(beta=0.05))

        assert report.converged
        assert report.mu_hat == pytest.approx(0.3, rel=0.1)
        assert report.hits <= report.n
        assert 0 <= report.explored <= report.n

    def test_zero_accidents_keep_half_width_undefined(self):
        sampler = build_sampler(_make_library(), uniform_exposure(_LINE), 0.05)

        report = run_campaign(
            sampler, lambda cells: np.zeros(len(cells), dtype=bool),
            _make_sampling(max_tests=200),
            case=CaseId.CUTIN, subject_name="never", seed=1,
        )

        assert report.mu_hat == 0.0
        assert report.half_width is None
        assert not report.converged

    def test_grid_sampler_needs_subject(self):
        with pytest.raises(DomainError, match="needs a subject"):
            self._run_without_subject()

    def _run_without_subject(self):
        sampler = ndd_sampler(uniform_exposure(_LINE))
        return run_campaign(
            sampler, None, _make_sampling(),
            case=CaseId.CUTIN, subject_name="none", seed=1,
        )

    def test_worker_count_checked(self):
        with pytest.raises(DomainError, match="workers"):
            self._run(_make_sampling(), workers=0)

    def test_tree_baseline_on_decision_process(self):
        report = naive_baseline(
            _make_toy_exposure(), None, SamplingConfig(epsilon=0.1, beta=0.05),
            case=CaseId.CAR_FOLLOWING, subject_name="toy", seed=3,
            mdp=_make_toy_mdp(),
        )

        assert report.mode == "ndd"
        assert report.converged
        assert report.mu_hat == pytest.approx(0.5, abs=0.05)

    def test_acceleration_ratio(self):
        library = self._run(_make_sampling(fixed_tests=10))
        baseline = self._run(_make_sampling(fixed_tests=40))

        assert acceleration_ratio(library, baseline) == pytest.approx(4.0)


class TestOracles:
    def test_exhaustive_grid_truth(self):
        exposure = uniform_exposure(_LINE)

        assert exhaustive_truth(_LINE, _subject, exposure, cap=10) == pytest.approx(0.3)

    def test_cells_without_exposure_are_skipped(self):
        mass = np.zeros(10)
        mass[[2, 3]] = 0.5
        exposure = ExposureModel(space=_LINE, mass=mass)
        seen = []

        def subject(cells):
            seen.extend(cells.tolist())
            return _subject(cells)

        assert exhaustive_truth(_LINE, subject, exposure, cap=10) == pytest.approx(0.5)
        assert seen == [2, 3]

    def test_cap_refused(self):
        with pytest.raises(OracleRefusedError, match="exceeds the cap"):
            exhaustive_truth(_LINE, _subject, uniform_exposure(_LINE), cap=5)

    def test_mdp_cap_refused(self):
        with pytest.raises(OracleRefusedError):
            exhaustive_mdp_truth(_make_toy_mdp(), _make_toy_exposure(), cap=3)


class TestAcceptance:
    @pytest.mark.slow
    def test_unbiased_over_repeated_campaigns(self):
        sampler = build_sampler(_make_library(), uniform_exposure(_LINE), 0.05)
        estimates = [
            run_campaign(
                sampler, _subject, _make_sampling(fixed_tests=100),
                case=CaseId.CUTIN, subject_name="toy", seed=seed, batch_size=100,
            ).mu_hat
            for seed in range(200)
        ]

        assert np.mean(estimates) == pytest.approx(0.3, abs=0.04)

    @pytest.mark.slow
    def test_library_needs_fewer_tests_than_ndd(self):
        mass = np.full(10, (1 - 1e-3) / 9)
        mass[7] = 1e-3
        exposure = ExposureModel(space=_LINE, mass=mass)
        library = GridLibrary.from_values(
            CaseId.CUTIN, _LINE, 1e-4, np.array([7]), np.array([1e-3])
        )
        sampling = _make_sampling()

        def rare(cells):
            return cells == 7

        proposed = run_campaign(
            build_sampler(library, exposure, sampling.epsilon), rare, sampling,
            case=CaseId.CUTIN, subject_name="toy", seed=1,
        )
        baseline = naive_baseline(
            exposure, rare, sampling,
            case=CaseId.CUTIN, subject_name="toy", seed=1,
        )

        assert proposed.converged and baseline.converged
        assert proposed.mu_hat == pytest.approx(1e-3, rel=0.3)
        assert acceleration_ratio(proposed, baseline) > 100
