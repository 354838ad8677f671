"""Command implementations of the ``tslg`` CLI."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from datetime import UTC, datetime
from pathlib import Path
from typing import TextIO

from tslg.configs import AppConfig, CaseConfig, CaseId, get_app_config, get_case_config
from tslg.core.evaluation import EvaluationReport, GroundTruth, acceleration_ratio
from tslg.core.exceptions import ConfigurationError, TslgError
from tslg.core.ndd import QueryBounds
from tslg.core.scenario import ExposureModel
from tslg.core.service import CasePipeline, get_pipeline
from tslg.infra.logging import setup_logging
from tslg.infra.storage import (
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
    write_report_json,
    write_rows_csv,
    write_trace_csv,
)
from tslg.infra.telemetry import init_telemetry

from .config import CLIConfig
from .exceptions import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    ReplayMismatchError,
    exit_code_for,
)
from .formatter import ResultFormatter

logger = logging.getLogger(__name__)

ArgParser = Callable[[list[str]], argparse.Namespace]


class _RunRecorder:
    """Collects inputs, outputs and step timings for a run manifest."""

    def __init__(self, command: str, argv: list[str], enabled: bool) -> None:
        self.enabled = enabled
        self.manifest = RunManifest(
            command=command, argv=list(argv), started_at=datetime.now(UTC)
        )

    def case(self, config: CaseConfig) -> None:
        self.manifest.case_config = config.model_dump(mode="json")
        self.manifest.seeds["seed"] = config.seed

    def read(self, path: Path) -> None:
        self.manifest.inputs.append(FileDigest.of(path))

    def wrote(self, path: Path) -> Path:
        self.manifest.outputs.append(FileDigest.of(path))
        return path

    @contextmanager
    def step(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.manifest.timings[name] = round(time.perf_counter() - start, 6)

    def finish(self, anchor: Path) -> None:
        if self.enabled:
            write_manifest(self.manifest, manifest_path(anchor))


class TslgCLI:
    """Dispatches parsed arguments to one command method each."""

    def __init__(
        self,
        config: CLIConfig,
        parse: ArgParser,
        output_stream: TextIO | None = None,
    ) -> None:
        self.config = config
        self.parse = parse
        self.formatter = ResultFormatter(output_stream or sys.stdout)

    def run(self, args: argparse.Namespace, argv: list[str]) -> int:
        handler = getattr(self, f"cmd_{args.command.replace('-', '_')}")
        recorder = _RunRecorder(args.command, argv, self.config.record_manifest)
        return handler(args, recorder)

    # ---- helpers ---------------------------------------------------------

    def _case_config(self, args: argparse.Namespace) -> CaseConfig:
        config = get_case_config(args.case, args.config)
        changes = {}
        if getattr(args, "seed", None) is not None:
            changes["seed"] = args.seed
        if getattr(args, "fixed_tests", None) is not None:
            changes["sampling"] = config.sampling.model_dump() | {
                "fixed_tests": args.fixed_tests
            }
        return config.replace(**changes) if changes else config

    def _pipeline(
        self, args: argparse.Namespace, rec: _RunRecorder
    ) -> tuple[CaseConfig, CasePipeline]:
        config = self._case_config(args)
        if args.config is not None:
            rec.read(Path(args.config))
        rec.case(config)
        return config, get_pipeline(config)

    def _exposure(
        self, pipeline: CasePipeline, events: Path | None, rec: _RunRecorder
    ) -> ExposureModel:
        if events is None:
            raise ConfigurationError("this command needs --events")
        with rec.step("exposure"):
            batch = read_events_csv(
                events, pipeline.pipeline_name, QueryBounds.for_case(pipeline.config)
            )
            exposure = pipeline.exposure(batch)
        rec.read(events)
        return exposure

    def _write_report(
        self, report: EvaluationReport, out: Path, stem: str, rec: _RunRecorder
    ) -> None:
        rec.wrote(write_report_json(report, out / f"{stem}report.json"))
        rec.wrote(write_trace_csv(report, out / f"{stem}trace.csv"))

    # ---- commands --------------------------------------------------------

    def cmd_gen_ndd(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        config, pipeline = self._pipeline(args, rec)
        n = args.n or config.ndd.n_events
        out = args.out or self.config.default_output(config.case.value, "events.csv")
        with rec.step("generate"):
            events = pipeline.generate_events(n, config.seed)
        rec.wrote(write_events_csv(events, out))
        self.formatter.events(config.case.value, len(events), str(out))
        rec.finish(out)
        return EXIT_OK

    def cmd_build_lib(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        config, pipeline = self._pipeline(args, rec)
        exposure = self._exposure(pipeline, args.events, rec)
        out = args.out or self.config.default_output(config.case.value, "library.json")
        with rec.step("build_library"):
            library = pipeline.build_library(exposure, config.seed, method=args.method)
        rec.wrote(save_library(library, out))
        self.formatter.library(library)
        rec.finish(out)
        return EXIT_OK

    def cmd_train_rl(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        args.case = CaseId.CAR_FOLLOWING.value
        return self.cmd_build_lib(args, rec)

    def cmd_evaluate(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        config, pipeline = self._pipeline(args, rec)
        exposure = self._exposure(pipeline, args.events, rec)
        out = args.out or self.config.default_output(config.case.value, "evaluation")

        if args.oracle == "exhaustive":
            with rec.step("oracle"):
                p_a = pipeline.ground_truth(exposure, self.config.cell_cap)
            truth = GroundTruth(
                case=config.case, subject=pipeline.subject_name, p_a=p_a
            )
            path = out / "truth.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(truth.model_dump_json(indent=2) + "\n", encoding="utf-8")
            rec.wrote(path)
            self.formatter.truth(config.case.value, p_a)
            rec.finish(out)
            return EXIT_OK

        with rec.step("campaign"):
            if args.baseline == "ndd":
                report = pipeline.baseline(
                    exposure, config.seed,
                    workers=self.config.workers, batch_size=self.config.batch_size,
                )
            else:
                if args.library is None:
                    raise ConfigurationError(
                        "evaluate needs --library or --baseline ndd"
                    )
                rec.read(args.library)
                library = load_library(args.library, config.case)
                report = pipeline.evaluate(
                    library, exposure, config.seed,
                    workers=self.config.workers, batch_size=self.config.batch_size,
                )
        self._write_report(report, out, "", rec)
        self.formatter.report(report)
        rec.finish(out)
        if report.fixed_tests is None and not report.converged:
            return EXIT_NOT_CONVERGED
        return EXIT_OK

    def cmd_compare(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        config, pipeline = self._pipeline(args, rec)
        exposure = self._exposure(pipeline, args.events, rec)
        rec.read(args.library)
        library = load_library(args.library, config.case)
        out = args.out or self.config.default_output(config.case.value, "compare")
        kwargs = {"workers": self.config.workers, "batch_size": self.config.batch_size}
        with rec.step("library_campaign"):
            proposed = pipeline.evaluate(library, exposure, config.seed, **kwargs)
        with rec.step("ndd_campaign"):
            baseline = pipeline.baseline(exposure, config.seed, **kwargs)
        self._write_report(proposed, out, "library_", rec)
        self._write_report(baseline, out, "ndd_", rec)
        self.formatter.report(proposed, prefix="library_")
        self.formatter.report(baseline, prefix="ndd_")
        self.formatter.comparison(
            acceleration_ratio(proposed, baseline), lower_bound=not baseline.converged
        )
        rec.finish(out)
        return EXIT_OK if proposed.converged else EXIT_NOT_CONVERGED

    def cmd_inspect(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        rec.read(args.library)
        library = load_library(args.library)
        self.formatter.library(library)
        if args.accident_map is None:
            return EXIT_OK
        args.case = library.case.value
        _, pipeline = self._pipeline(args, rec)
        exposure = self._exposure(pipeline, args.events, rec)
        with rec.step("accident_map"):
            header, rows = pipeline.accident_map(library, exposure)
        rec.wrote(write_rows_csv(header, rows, args.accident_map))
        rec.finish(args.accident_map)
        return EXIT_OK

    def cmd_replay(self, args: argparse.Namespace, rec: _RunRecorder) -> int:
        manifest = read_manifest(args.manifest)
        replayed = self.parse(manifest.argv)
        if replayed.command == "replay":
            raise ConfigurationError("a replay manifest cannot be replayed")
        logger.info("Replaying %s (%s).", manifest.command, manifest.run_id)
        quiet = TslgCLI(
            self.config.model_copy(update={"record_manifest": False}),
            self.parse,
            output_stream=self.formatter.output,
        )
        code = quiet.run(replayed, manifest.argv)
        results = compare_outputs(manifest)
        self.formatter.replay(results)
        if not all(same for _, same in results):
            raise ReplayMismatchError("replayed outputs differ from the manifest")
        return code


def main(argv: list[str], args: argparse.Namespace, parse: ArgParser) -> int:
    """Configure logging and tracing, then run one command."""
    app: AppConfig = get_app_config()
    logging_config = app.logging
    if args.debug:
        logging_config = logging_config.model_copy(update={"level": "DEBUG"})
    setup_logging(logging_config)
    init_telemetry(app.tracing)

    config = CLIConfig.resolve(
        app,
        workers=getattr(args, "workers", None),
        batch_size=getattr(args, "batch_size", None),
    )
    try:
        return TslgCLI(config, parse).run(args, argv)
    except (TslgError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return exit_code_for(exc)
