"""Tests for event CSVs, library documents, reports and run manifests."""

import json
from datetime import datetime

import numpy as np
import pytest

from tslg.configs import CaseId, DimensionSpec
from tslg.core.evaluation import estimate
from tslg.core.evaluation.report import CampaignTrace, EvaluationReport
from tslg.core.exceptions import (
    ConfigurationError,
    DomainError,
    EmptyInputError,
    LibraryMismatchError,
)
from tslg.core.ndd import EventBatch
from tslg.core.scenario import GridLibrary, ScenarioSpace
from tslg.infra.storage import (
    EVENT_COLUMNS,
    FileDigest,
    RunManifest,
    compare_outputs,
    load_library,
    manifest_path,
    read_events_csv,
    read_manifest,
    save_library,
    write_events_csv,
    write_manifest,
    write_rows_csv,
    write_trace_csv,
)

_LINE = ScenarioSpace(
    dims=(DimensionSpec(name="x", lower=0.0, upper=9.0, step=1.0),)
)


def _make_library(case: CaseId = CaseId.CUTIN) -> GridLibrary:
    return GridLibrary.from_values(
        case, _LINE, 0.01, np.array([2, 5]), np.array([0.3, 0.1])
    )


class TestEventsCsv:
    def test_roundtrip(self, tmp_path):
        events = EventBatch(
            case=CaseId.CAR_FOLLOWING,
            trajectory=np.array([[30.0, 40.5, 29.25]]),
            free_driving=np.array([[31.0, 0.2], [30.0, -0.4]]),
        )

        path = write_events_csv(events, tmp_path / "events.csv")
        loaded = read_events_csv(path, case="car_following")

        assert loaded.case is CaseId.CAR_FOLLOWING
        np.testing.assert_array_equal(loaded.trajectory, events.trajectory)
        np.testing.assert_array_equal(loaded.free_driving, events.free_driving)
        assert len(loaded.cutin) == 0

    def test_header_written(self, tmp_path):
        events = EventBatch(case=CaseId.CUTIN, cutin=np.array([[10.0, -1.5]]))

        path = write_events_csv(events, tmp_path / "events.csv")

        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(EVENT_COLUMNS)
        assert lines[1] == "cutin,cutin,10.0,-1.5,,,,"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="does not exist"):
            read_events_csv(tmp_path / "absent.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text("case,r,r_dot\ncutin,1,2\n")

        with pytest.raises(DomainError, match="header"):
            read_events_csv(path)

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(",".join(EVENT_COLUMNS) + "\ncutin,cutin,ten,1.0,,,,\n")

        with pytest.raises(DomainError, match=":2: malformed"):
            read_events_csv(path)

    def test_row_outside_query_bounds(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(
            ",".join(EVENT_COLUMNS)
            + "\ncutin,cutin,10.0,-1.0,,,,\ncutin,cutin,95.0,0.0,,,,\n"
        )

        with pytest.raises(DomainError, match=":3: cutin event outside the query"):
            read_events_csv(path)

    def test_header_only_is_empty(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(",".join(EVENT_COLUMNS) + "\n")

        with pytest.raises(EmptyInputError):
            read_events_csv(path)

    def test_wrong_case(self, tmp_path):
        events = EventBatch(case=CaseId.CUTIN, cutin=np.array([[10.0, -1.5]]))
        path = write_events_csv(events, tmp_path / "events.csv")

        with pytest.raises(ConfigurationError, match="holds cutin events"):
            read_events_csv(path, case="highway_exit")


class TestLibraryFiles:
    def test_roundtrip(self, tmp_path):
        library = _make_library()

        path = save_library(library, tmp_path / "libs" / "cutin.json")
        loaded = load_library(path, CaseId.CUTIN)

        assert loaded.model_dump() == library.model_dump()
        np.testing.assert_array_equal(loaded.cells, [2, 5])

    def test_wrong_case(self, tmp_path):
        path = save_library(_make_library(), tmp_path / "cutin.json")

        with pytest.raises(LibraryMismatchError, match="not highway_exit"):
            load_library(path, "highway_exit")

    def test_invalid_document(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"kind": "grid", "case": "cutin"}))

        with pytest.raises(LibraryMismatchError, match="not a valid library"):
            load_library(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_library(tmp_path / "absent.json")


class TestReports:
    def _make_report(self) -> EvaluationReport:
        terms = np.array([0.2, 0.0])
        result = estimate(terms)
        return EvaluationReport(
            case=CaseId.CUTIN,
            mode="library",
            subject="acc_aeb",
            seed=1,
            n=2,
            hits=1,
            mu_hat=result.mu_hat,
            variance=result.variance,
            half_width=result.half_width,
            converged=False,
            confidence=0.95,
            beta=0.2,
            epsilon=0.1,
            batch_size=2,
            trace=CampaignTrace.empty(),
        )

    def test_trace_is_not_part_of_the_report(self):
        dumped = json.loads(self._make_report().model_dump_json())

        assert "trace" not in dumped
        assert dumped["mu_hat"] == pytest.approx(0.1)

    def test_trace_csv_header(self, tmp_path):
        path = write_trace_csv(self._make_report(), tmp_path / "trace.csv")

        assert path.read_text().splitlines()[0] == (
            "test_index,scenario_id,weight,indicator,mu_hat,half_width"
        )

    def test_floats_use_shortest_form(self, tmp_path):
        path = write_rows_csv(("a", "b"), [(0.1, 3), (float("inf"), "x")],
                              tmp_path / "rows.csv")

        assert path.read_text() == "a,b\n0.1,3\ninf,x\n"


class TestManifest:
    def _make_manifest(self, output) -> RunManifest:
        return RunManifest(
            command="build-library",
            argv=["build-library", "--case", "cutin"],
            seeds={"search": 7},
            outputs=[FileDigest.of(output)],
            started_at=datetime(2026, 1, 1, 12, 0, 0),
        )

    def test_write_and_read(self, tmp_path):
        output = tmp_path / "library.json"
        output.write_text("{}")
        manifest = self._make_manifest(output)

        path = write_manifest(manifest, manifest_path(output))

        assert path.name == "library.json.manifest.json"
        assert read_manifest(path) == manifest
        assert manifest.run_id.startswith("run")

    def test_compare_outputs_flags_changed_files(self, tmp_path):
        same, changed, gone = (tmp_path / n for n in ("a.txt", "b.txt", "c.txt"))
        for path in (same, changed, gone):
            path.write_text("before")
        manifest = self._make_manifest(same)
        manifest.outputs.extend([FileDigest.of(changed), FileDigest.of(gone)])
        changed.write_text("after")
        gone.unlink()

        assert compare_outputs(manifest) == [
            (str(same), True),
            (str(changed), False),
            (str(gone), False),
        ]

    def test_not_a_manifest(self, tmp_path):
        path = tmp_path / "x.manifest.json"
        path.write_text("[]")

        with pytest.raises(ConfigurationError, match="not a run manifest"):
            read_manifest(path)
