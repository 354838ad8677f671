"""Tests for naturalistic events, exposure histograms and the common set."""

import numpy as np
import pytest

from tslg.configs import CaseConfig, CaseId, DimensionSpec
from tslg.core.exceptions import DomainError, EmptyInputError, ExtractionError
from tslg.core.ndd import (
    CF_POINT_SPACE,
    CommonSet,
    EventBatch,
    EventRecord,
    QueryBounds,
    build_histogram,
    common_set_for,
    extract_common_set,
    highway_exposure,
    mdp_exposure,
    most_frequent_common_set,
    normalization_factors,
    synth_events,
)
from tslg.core.scenario import ExposureModel, ScenarioSpace, action_values, build_space


def _make_cutin_space() -> ScenarioSpace:
    return ScenarioSpace(
        dims=(
            DimensionSpec(
                name="range", lower=0.0, upper=6.0, step=2.0, lower_open=True
            ),
            DimensionSpec(name="range_rate", lower=-1.0, upper=1.0, step=1.0),
        )
    )


def _make_cutin_batch(*rows: tuple[float, float]) -> EventBatch:
    return EventBatch(case=CaseId.CUTIN, cutin=np.array(rows, dtype=float))


class TestEvents:
    def test_records_roundtrip_columns(self):
        records = [
            EventRecord(case="car_following", kind="trajectory",
                        v_lead=30.0, r=40.0, v_follow=29.0),
            EventRecord(case="car_following", kind="free_driving", v=31.0, u=0.2),
        ]

        batch = EventBatch.from_records(records)

        assert len(batch) == 2
        assert batch.observations()["range_rate"][0] == pytest.approx(1.0)
        assert list(batch.records()) == records

    def test_missing_field_rejected(self):
        with pytest.raises(ValueError, match="lacks r_dot"):
            EventRecord(case="cutin", kind="cutin", r=10.0)

    @pytest.mark.parametrize(
        ("r", "r_dot"),
        [
            (0.05, 0.0),
            (95.0, 0.0),
            (10.0, 12.0),
            (10.0, -28.5),
        ],
    )
    def test_cutin_outside_query_bounds_rejected(self, r, r_dot):
        with pytest.raises(ValueError, match="outside the query bounds"):
            EventRecord(case="cutin", kind="cutin", r=r, r_dot=r_dot)

    def test_free_driving_action_outside_bounds_rejected(self):
        with pytest.raises(ValueError, match="outside the query bounds"):
            EventRecord(case="car_following", kind="free_driving", v=30.0, u=2.2)

    def test_bounds_from_validation_context(self):
        bounds = QueryBounds(cutin_range=(0.1, 120.0))
        data = {"case": "cutin", "kind": "cutin", "r": 95.0, "r_dot": 0.0}

        record = EventRecord.model_validate(data, context={"bounds": bounds})

        assert record.r == 95.0

    def test_bounds_for_case(self):
        config = CaseConfig.for_case("cutin")

        bounds = QueryBounds.for_case(config)

        assert bounds.cutin_range == (0.1, 90.0)
        assert bounds.cutin_speed == (2.0, 40.0)
        assert bounds.ego_speed == 30.0

    def test_mixed_cases_rejected(self):
        records = [
            EventRecord(case="cutin", kind="cutin", r=10.0, r_dot=0.0),
            EventRecord(case="highway_exit", kind="trajectory",
                        v_lead=30.0, r=40.0, v_follow=29.0),
        ]

        with pytest.raises(DomainError, match="mixed cases"):
            EventBatch.from_records(records)

    def test_empty_records(self):
        with pytest.raises(EmptyInputError):
            EventBatch.from_records([])

    def test_free_driving_only_has_no_observations(self):
        batch = EventBatch(
            case=CaseId.CAR_FOLLOWING, free_driving=np.array([[30.0, 0.0]])
        )

        with pytest.raises(EmptyInputError):
            batch.observations()


class TestSynthetic:
    def test_deterministic_for_seed(self):
        config = CaseConfig.for_case("cutin")

        first = synth_events(config, 500, seed=3)
        second = synth_events(config, 500, seed=3)

        np.testing.assert_array_equal(first.cutin, second.cutin)

    def test_cutin_inside_query_bounds(self):
        config = CaseConfig.for_case("cutin")

        batch = synth_events(config, 2000, seed=1)

        assert batch.cutin.shape == (2000, 2)
        assert (batch.cutin[:, 0] > 0.1).all()
        assert (batch.cutin[:, 0] < 90.0).all()
        speed = config.simulation.ego_speed + batch.cutin[:, 1]
        assert ((speed > 2.0) & (speed < 40.0)).all()

    def test_car_following_adds_free_driving(self):
        config = CaseConfig.for_case("car_following")

        batch = synth_events(config, 300, seed=1)

        assert batch.trajectory.shape == (300, 3)
        assert batch.free_driving.shape == (300, 2)
        u = batch.free_driving[:, 1]
        np.testing.assert_allclose(u / 0.2, np.rint(u / 0.2), atol=1e-9)

    def test_highway_has_no_free_driving(self):
        batch = synth_events(CaseConfig.for_case("highway_exit"), 100, seed=1)

        assert len(batch.free_driving) == 0
        assert len(batch.trajectory) == 100

    def test_nonpositive_count(self):
        with pytest.raises(DomainError, match="at least 1"):
            synth_events(CaseConfig.for_case("cutin"), 0, seed=1)


class TestHistogram:
    def test_counts_normalized_and_rejections_kept(self):
        space = _make_cutin_space()
        batch = _make_cutin_batch((1.0, 0.0), (2.0, 0.0), (3.9, 1.0), (50.0, 0.0))

        model = build_histogram(batch, space)

        assert model.rejected == 1
        assert model.mass[space.cell_index([0, 1])] == pytest.approx(2 / 3)
        assert model.mass[space.cell_index([1, 2])] == pytest.approx(1 / 3)
        assert model.mass.sum() == pytest.approx(1.0)

    def test_all_events_outside(self):
        batch = _make_cutin_batch((50.0, 0.0))

        with pytest.raises(EmptyInputError, match="no event"):
            build_histogram(batch, _make_cutin_space())

    def test_missing_column(self):
        space = ScenarioSpace(
            dims=(DimensionSpec(name="bv_speed", lower=0.0, upper=1.0, step=1.0),)
        )

        with pytest.raises(DomainError, match="no column"):
            build_histogram(_make_cutin_batch((1.0, 0.0)), space)

    def test_mdp_exposure_action_rows(self):
        config = CaseConfig.for_case("car_following")
        space = build_space(config)
        actions = action_values(config)
        batch = EventBatch(
            case=CaseId.CAR_FOLLOWING,
            trajectory=np.array([[30.0, 20.0, 30.0]]),
            free_driving=np.array([[30.0, 0.0], [30.0, 0.0], [30.2, -1.0]]),
        )

        model = mdp_exposure(batch, space, actions)

        state = int(np.argmax(model.mass))
        row = model.action_mass[state]
        assert row[np.argmin(np.abs(actions))] == pytest.approx(2 / 3)
        assert row[np.argmin(np.abs(actions + 1.0))] == pytest.approx(1 / 3)
        # speed bucket without data
        assert model.action_mass[0] == pytest.approx(np.full(len(actions), 1 / 31))

    def test_event_order_does_not_matter(self):
        config = CaseConfig.for_case("cutin")
        space = build_space(config)
        batch = synth_events(config, 5000, seed=2)
        order = np.random.default_rng(1).permutation(len(batch.cutin))

        shuffled = EventBatch(case=CaseId.CUTIN, cutin=batch.cutin[order])

        np.testing.assert_array_equal(
            build_histogram(shuffled, space).mass, build_histogram(batch, space).mass
        )

    @pytest.mark.slow
    def test_cutin_mode_cell(self):
        config = CaseConfig.for_case("cutin")
        space = build_space(config)

        model = build_histogram(synth_events(config, 1_000_000, seed=5), space)

        r, r_dot = space.cell_values(int(np.argmax(model.mass)))
        assert r == pytest.approx(14.0)
        assert r_dot == pytest.approx(0.0, abs=1e-9)

    def test_mdp_exposure_actions_peak_at_zero_at_cruise_speed(self):
        config = CaseConfig.for_case("car_following")
        space = build_space(config)
        actions = action_values(config)
        batch = synth_events(config, 200_000, seed=4)

        model = mdp_exposure(batch, space, actions)

        row = model.action_mass[int(space.locate(np.array([30.0, 20.0, 0.0]))[0])]
        n = int((np.abs(batch.free_driving[:, 0] - 30.0) <= 0.5).sum())
        noise = 3 * np.sqrt(2 * row.max() / n)
        zero = int(np.argmin(np.abs(actions)))
        steps = np.diff(row)
        assert row[zero] >= row.max() - noise
        assert (steps[:zero] >= -noise).all()
        assert (steps[zero:] <= noise).all()

    def test_mdp_exposure_needs_free_driving(self):
        config = CaseConfig.for_case("car_following")
        batch = EventBatch(
            case=CaseId.CAR_FOLLOWING, trajectory=np.array([[30.0, 20.0, 30.0]])
        )

        with pytest.raises(EmptyInputError):
            mdp_exposure(batch, build_space(config), action_values(config))

    @pytest.mark.slow
    def test_highway_exposure_is_normalized(self):
        config = CaseConfig.for_case("highway_exit")
        batch = synth_events(config, 20_000, seed=1)

        model = highway_exposure(batch, build_space(config))

        assert model.mass.sum() == pytest.approx(1.0)
        assert CF_POINT_SPACE.total_count == 21 * 61 * 21


class TestCommonSet:
    def _make_model(self) -> ExposureModel:
        space = _make_cutin_space()
        mass = np.zeros(space.total_count)
        mass[space.cell_index([0, 1])] = 0.6
        mass[space.cell_index([1, 1])] = 0.3
        mass[space.cell_index([2, 0])] = 0.1
        return ExposureModel(space=space, mass=mass)

    def test_threshold_bounding_box(self):
        omega = extract_common_set(self._make_model(), threshold=0.2)

        assert omega.lower == (2.0, 0.0)
        assert omega.upper == (4.0, 0.0)

    def test_lower_threshold_only_grows_the_box(self):
        config = CaseConfig.for_case("cutin")
        model = build_histogram(
            synth_events(config, 50_000, seed=6), build_space(config)
        )

        boxes = [
            extract_common_set(model, threshold)
            for threshold in (5e-3, 2e-3, 1e-3, 5e-4, 1e-4)
        ]

        for inner, outer in zip(boxes, boxes[1:], strict=False):
            assert all(o <= i for i, o in zip(inner.lower, outer.lower, strict=True))
            assert all(o >= i for i, o in zip(inner.upper, outer.upper, strict=True))
        assert boxes[-1] != boxes[0]

    def test_threshold_too_high(self):
        with pytest.raises(ExtractionError, match="above"):
            extract_common_set(self._make_model(), threshold=0.9)

    def test_most_frequent(self):
        omega = most_frequent_common_set(self._make_model())

        assert omega.lower == omega.upper == (2.0, 0.0)

    def test_unknown_mode(self):
        with pytest.raises(DomainError, match="unknown common-set mode"):
            common_set_for(self._make_model(), "median", 0.1)

    def test_distances_and_contains(self):
        omega = CommonSet(names=("a", "b"), lower=(0.0, 0.0), upper=(1.0, 1.0))

        np.testing.assert_allclose(omega.distances(np.array([3.0, -2.0])), [2.0, 2.0])
        assert omega.contains(np.array([0.5, 1.0]))
        assert not omega.contains(np.array([0.5, 1.5]))

    def test_normalization_factors(self):
        model = self._make_model()
        omega = extract_common_set(model, threshold=0.2)

        factors = normalization_factors(model, omega)

        assert factors == {"range": 2.0, "range_rate": 1.0}

    def test_zero_factor_clamped(self):
        space = ScenarioSpace(
            dims=(DimensionSpec(name="a", lower=0.0, upper=1.0, step=1.0),)
        )
        model = ExposureModel(space=space, mass=np.array([0.5, 0.5]))
        omega = extract_common_set(model, threshold=0.1)

        assert normalization_factors(model, omega) == {"a": 1.0}
