"""Result lines printed on stdout.

Everything printed here is a function of the command's inputs; no clocks,
ids or paths that change between runs other than the ones the user gave.
"""

from __future__ import annotations

from typing import TextIO

from tslg.core.evaluation import EvaluationReport
from tslg.core.scenario import GridLibrary, Library, TreeLibrary


class ResultFormatter:
    """Formats command results as ``key: value`` lines."""

    def __init__(self, output: TextIO) -> None:
        self.output = output

    def events(self, case: str, count: int, path: str) -> None:
        self._line("case", case)
        self._line("events", count)
        self._line("written", path)

    def library(self, library: Library) -> None:
        self._line("case", library.case.value)
        self._line("kind", library.kind)
        self._line("library_size", library.size)
        if isinstance(library, GridLibrary):
            self._line("gamma", f"{library.gamma:.4e}")
            self._line("w", f"{library.w:.6e}")
            self._line("coverage", f"{library.coverage:.6f}")
        elif isinstance(library, TreeLibrary):
            self._line("dangerous_states", len(library.zones.dangerous))
            self._line("collision_states", len(library.zones.collision))
            self._line("p_s", f"{library.p_s:.6e}")
            self._line("normalization", f"{library.normalization:.6e}")
            self._line("coverage", f"{library.size / library.space.total_count:.6f}")

    def report(self, report: EvaluationReport, prefix: str = "") -> None:
        half = "inf" if report.half_width is None else f"{report.half_width:.4f}"
        self._line(f"{prefix}mode", report.mode)
        self._line(f"{prefix}tests", report.n)
        self._line(f"{prefix}accidents", report.hits)
        self._line(f"{prefix}p_hat", f"{report.mu_hat:.6e}")
        self._line(f"{prefix}half_width", half)
        self._line(f"{prefix}converged", str(report.converged).lower())

    def comparison(self, ratio: float, lower_bound: bool) -> None:
        self._line("acceleration", f"{'>=' if lower_bound else ''}{ratio:.1f}")

    def truth(self, case: str, value: float) -> None:
        self._line("case", case)
        self._line("exhaustive_p_a", f"{value:.10e}")

    def replay(self, results: list[tuple[str, bool]]) -> None:
        for path, same in results:
            self._line(path, "identical" if same else "DIFFERENT")

    def _line(self, key: str, value: object) -> None:
        self.output.write(f"{key}: {value}\n")
        self.output.flush()
