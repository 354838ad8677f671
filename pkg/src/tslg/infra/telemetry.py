"""OpenTelemetry bootstrap and span vocabulary.

Configures a ``TracerProvider`` with an OTLP HTTP exporter when tracing is
enabled via ``TracingConfig``.  When disabled the module is a graceful no-op
and ``tracer`` hands out non-recording spans.

Usage::

    from tslg.infra.telemetry import SPAN_RL_TD_TRAIN, tracer

    with tracer.start_as_current_span(SPAN_RL_TD_TRAIN) as span:
        ...
"""

from __future__ import annotations

import logging

from opentelemetry import trace

from tslg.configs.system import TracingConfig

logger = logging.getLogger(__name__)

tracer = trace.get_tracer("tslg")

# ---------------------------------------------------------------------------
# Span names
# ---------------------------------------------------------------------------

SPAN_NDD_SYNTH = "ndd.synth"
SPAN_NDD_HISTOGRAM = "ndd.histogram"
SPAN_SEARCH_LIBRARY = "search.library"
SPAN_RL_ZONES = "rl.zones"
SPAN_RL_TD_TRAIN = "rl.td_train"
SPAN_RL_BACKWARD = "rl.backward_induction"
SPAN_RL_P_S = "rl.p_s"
SPAN_EVAL_CAMPAIGN = "eval.campaign"
SPAN_EVAL_EXHAUSTIVE = "eval.exhaustive"

# ---------------------------------------------------------------------------
# Span attribute keys
# ---------------------------------------------------------------------------

ATTR_CASE = "tslg.case"
ATTR_EVENT_COUNT = "ndd.event_count"
ATTR_REJECTED = "ndd.rejected"
ATTR_LIBRARY_SIZE = "search.library_size"
ATTR_EVALUATIONS = "search.evaluations"
ATTR_GAMMA = "search.gamma"
ATTR_DANGEROUS = "rl.dangerous_states"
ATTR_SWEEPS = "rl.sweeps"
ATTR_UPDATES = "rl.updates"
ATTR_TESTS = "eval.tests"
ATTR_CONVERGED = "eval.converged"
ATTR_MODE = "eval.mode"


def init_telemetry(settings: TracingConfig | None = None) -> None:
    """Initialise the OTEL ``TracerProvider``.

    No-op when *settings* is ``None``, tracing is disabled, or no endpoint
    is configured.
    """
    if settings is None or not settings.enabled:
        logger.debug("OpenTelemetry tracing disabled.")
        return

    if not settings.endpoint:
        logger.warning("Tracing enabled but no endpoint configured; skipping.")
        return

    from opentelemetry.exporter.otlp.proto.http.trace_exporter import (
        OTLPSpanExporter,
    )
    from opentelemetry.sdk.resources import Resource
    from opentelemetry.sdk.trace import TracerProvider
    from opentelemetry.sdk.trace.export import BatchSpanProcessor
    from opentelemetry.sdk.trace.sampling import ParentBased, TraceIdRatioBased

    resource = Resource.create({"service.name": settings.service_name})
    sampler = ParentBased(root=TraceIdRatioBased(settings.sample_rate))
    provider = TracerProvider(resource=resource, sampler=sampler)
    provider.add_span_processor(
        BatchSpanProcessor(OTLPSpanExporter(endpoint=settings.endpoint))
    )
    trace.set_tracer_provider(provider)
    logger.info(
        "OpenTelemetry tracing initialised (service=%s).", settings.service_name
    )
