"""Tests for the ``tslg`` command line."""

import io
import json
import os
from unittest.mock import patch

import pytest

from cli.__main__ import parse_args
from cli.exceptions import (
    EXIT_FAILURE,
    EXIT_NOT_CONVERGED,
    EXIT_ORACLE_REFUSED,
    EXIT_USAGE,
    ReplayMismatchError,
    exit_code_for,
)
from cli.formatter import ResultFormatter
from cli.tslg_cli import main
from tslg.core.exceptions import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    EmptyLibraryError,
    LibraryMismatchError,
    OracleRefusedError,
)
from tslg.infra.storage import read_manifest


def _run(argv: list[str], tmp_path) -> int:
    env = {"TSLG_OUTPUT__DIR": str(tmp_path / "out")}
    with patch.dict(os.environ, env):
        return main(argv, parse_args(argv), parse_args)


def _write_small_cutin(tmp_path):
    path = tmp_path / "cutin.yaml"
    path.write_text("case: cutin\nseed: 5\nndd:\n  n_events: 20000\n")
    return path


class TestParseArgs:
    def test_gen_ndd(self):
        args = parse_args(["gen-ndd", "--case", "cutin", "--n", "10"])

        assert args.command == "gen-ndd"
        assert args.case == "cutin"
        assert args.n == 10
        assert args.seed is None

    def test_train_rl_needs_no_case(self):
        args = parse_args(["train-rl", "--events", "e.csv", "--method", "backward"])

        assert args.method == "backward"
        assert not hasattr(args, "case")

    def test_evaluate_options(self):
        args = parse_args([
            "--debug", "evaluate", "--case", "highway_exit", "--events", "e.csv",
            "--baseline", "ndd", "--workers", "4", "--fixed-tests", "100",
        ])

        assert args.debug
        assert args.baseline == "ndd"
        assert args.workers == 4
        assert args.fixed_tests == 100

    def test_unknown_case(self):
        with pytest.raises(SystemExit):
            parse_args(["gen-ndd", "--case", "roundabout"])

    def test_command_required(self):
        with pytest.raises(SystemExit):
            parse_args([])


class TestExitCodes:
    @pytest.mark.parametrize(
        ("exc", "code"),
        [
            (ConfigurationError("x"), EXIT_USAGE),
            (DomainError("x"), EXIT_USAGE),
            (LibraryMismatchError("x"), EXIT_USAGE),
            (FileNotFoundError("x"), EXIT_USAGE),
            (ConvergenceError("x"), EXIT_NOT_CONVERGED),
            (OracleRefusedError("x"), EXIT_ORACLE_REFUSED),
            (EmptyLibraryError("x"), EXIT_FAILURE),
            (ReplayMismatchError("x"), EXIT_FAILURE),
        ],
    )
    def test_mapping(self, exc, code):
        assert exit_code_for(exc) == code


class TestFormatter:
    def test_lines(self):
        stream = io.StringIO()
        formatter = ResultFormatter(stream)

        formatter.events("cutin", 3, "events.csv")
        formatter.comparison(12.345, lower_bound=True)
        formatter.replay([("a.json", True), ("b.csv", False)])

        assert stream.getvalue().splitlines() == [
            "case: cutin",
            "events: 3",
            "written: events.csv",
            "acceleration: >=12.3",
            "a.json: identical",
            "b.csv: DIFFERENT",
        ]


class TestCommands:
    def test_gen_ndd_writes_events_and_manifest(self, tmp_path, capsys):
        config = _write_small_cutin(tmp_path)
        out = tmp_path / "events.csv"

        code = _run(
            ["gen-ndd", "--case", "cutin", "--config", str(config), "--n", "50",
             "--out", str(out)],
            tmp_path,
        )

        assert code == 0
        assert len(out.read_text().splitlines()) == 51
        manifest = read_manifest(tmp_path / "events.csv.manifest.json")
        assert manifest.seeds == {"seed": 5}
        assert [item.path for item in manifest.outputs] == [str(out)]
        assert "events: 50" in capsys.readouterr().out

    def test_default_output_directory(self, tmp_path):
        code = _run(["gen-ndd", "--case", "cutin", "--n", "5"], tmp_path)

        assert code == 0
        assert (tmp_path / "out" / "cutin" / "events.csv").is_file()

    def test_replay_reproduces_outputs(self, tmp_path, capsys):
        out = tmp_path / "events.csv"
        _run(["gen-ndd", "--case", "cutin", "--n", "20", "--seed", "3",
              "--out", str(out)], tmp_path)
        capsys.readouterr()

        code = _run(
            ["replay", "--manifest", str(tmp_path / "events.csv.manifest.json")],
            tmp_path,
        )

        assert code == 0
        assert f"{out}: identical" in capsys.readouterr().out

    def test_replay_detects_changed_output(self, tmp_path, capsys):
        out = tmp_path / "events.csv"
        _run(["gen-ndd", "--case", "cutin", "--n", "20", "--out", str(out)], tmp_path)
        manifest = tmp_path / "events.csv.manifest.json"
        data = json.loads(manifest.read_text())
        data["outputs"][0]["sha256"] = "0" * 64
        manifest.write_text(json.dumps(data))

        code = _run(["replay", "--manifest", str(manifest)], tmp_path)

        assert code == EXIT_FAILURE
        assert "DIFFERENT" in capsys.readouterr().out

    def test_missing_events_file(self, tmp_path, capsys):
        code = _run(
            ["build-lib", "--case", "cutin", "--events", str(tmp_path / "none.csv")],
            tmp_path,
        )

        assert code == EXIT_USAGE
        assert "does not exist" in capsys.readouterr().err

    def test_evaluate_needs_a_library(self, tmp_path, capsys):
        events = tmp_path / "events.csv"
        _run(["gen-ndd", "--case", "cutin", "--n", "200", "--out", str(events)],
             tmp_path)

        code = _run(
            ["evaluate", "--case", "cutin", "--events", str(events)], tmp_path
        )

        assert code == EXIT_USAGE
        assert "--library" in capsys.readouterr().err

    def test_config_for_another_case(self, tmp_path):
        config = tmp_path / "other.yaml"
        config.write_text("case: highway_exit\n")

        code = _run(["gen-ndd", "--case", "cutin", "--config", str(config)], tmp_path)

        assert code == EXIT_USAGE

    @pytest.mark.slow
    def test_cutin_pipeline(self, tmp_path, capsys):
        config = _write_small_cutin(tmp_path)
        events, library = tmp_path / "events.csv", tmp_path / "library.json"
        common = ["--case", "cutin", "--config", str(config)]
        _run(["gen-ndd", *common, "--out", str(events)], tmp_path)

        built = _run(["build-lib", *common, "--events", str(events),
                      "--out", str(library)], tmp_path)
        shown = _run(["inspect", "--library", str(library)], tmp_path)
        evaluated = _run(
            ["evaluate", *common, "--events", str(events), "--library", str(library),
             "--fixed-tests", "500", "--out", str(tmp_path / "eval")],
            tmp_path,
        )

        assert (built, shown, evaluated) == (0, 0, 0)
        report = json.loads((tmp_path / "eval" / "report.json").read_text())
        assert report["n"] == 500
        assert report["fixed_tests"] == 500
        trace = (tmp_path / "eval" / "trace.csv").read_text().splitlines()
        assert len(trace) == 501
        assert "kind: grid" in capsys.readouterr().out

    @pytest.mark.slow
    def test_exhaustive_oracle(self, tmp_path, capsys):
        config = _write_small_cutin(tmp_path)
        events = tmp_path / "events.csv"
        common = ["--case", "cutin", "--config", str(config)]
        _run(["gen-ndd", *common, "--out", str(events)], tmp_path)

        code = _run(
            ["evaluate", *common, "--events", str(events), "--oracle", "exhaustive",
             "--out", str(tmp_path / "truth")],
            tmp_path,
        )

        assert code == 0
        truth = json.loads((tmp_path / "truth" / "truth.json").read_text())
        assert 0.0 <= truth["p_a"] <= 1.0
        assert "exhaustive_p_a:" in capsys.readouterr().out
