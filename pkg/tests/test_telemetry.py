"""Tests for the tracing bootstrap and the log trace-context filter."""

import logging
from unittest.mock import patch

from opentelemetry import trace

from tslg.configs.system import TracingConfig
from tslg.infra import telemetry
from tslg.infra.logging import _TraceContextFilter


def _make_record() -> logging.LogRecord:
    return logging.LogRecord("tslg", logging.INFO, __file__, 1, "msg", None, None)


class TestInitTelemetry:
    def test_disabled_leaves_provider_alone(self):
        with patch.object(trace, "set_tracer_provider") as set_provider:
            telemetry.init_telemetry(TracingConfig(enabled=False))
            telemetry.init_telemetry(None)

        set_provider.assert_not_called()

    def test_enabled_without_endpoint_is_skipped(self, caplog):
        with patch.object(trace, "set_tracer_provider") as set_provider:
            with caplog.at_level(logging.WARNING, logger="tslg.infra.telemetry"):
                telemetry.init_telemetry(TracingConfig(enabled=True))

        set_provider.assert_not_called()
        assert "no endpoint" in caplog.text

    def test_module_exports_only_the_bootstrap_and_vocabulary(self):
        public = {n for n in vars(telemetry) if not n.startswith("_")}

        assert {"init_telemetry", "tracer"} <= public
        assert not {n for n in public if n.startswith("get_")}


class TestTraceContextFilter:
    def test_no_active_span_gives_empty_ids(self):
        record = _make_record()

        assert _TraceContextFilter().filter(record)
        assert record.trace_id == ""
        assert record.span_id == ""

    def test_active_span_ids_are_hex(self):
        context = trace.SpanContext(
            trace_id=0xABC, span_id=0x12, is_remote=False,
            trace_flags=trace.TraceFlags(trace.TraceFlags.SAMPLED),
        )
        record = _make_record()

        with trace.use_span(trace.NonRecordingSpan(context)):
            _TraceContextFilter().filter(record)

        assert record.trace_id == format(0xABC, "032x")
        assert record.span_id == format(0x12, "016x")
