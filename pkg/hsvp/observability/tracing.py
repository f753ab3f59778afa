"""OpenTelemetry tracing setup."""

import logging
import sys

from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor

from hsvp import __version__
from hsvp.config.models import TracingConfig

logger = logging.getLogger(__name__)

_configured = False


def setup_tracing(config: TracingConfig) -> None:
    """Install a tracer provider when tracing is enabled.

    Without it the OpenTelemetry API hands out no-op tracers, so spans in the
    solvers cost next to nothing.

    Args:
        config: Tracing configuration
    """
    global _configured
    if not config.enabled or _configured:
        return

    resource = Resource.create(
        {
            "service.name": "hsvp",
            "service.version": __version__,
        }
    )
    tracer_provider = TracerProvider(resource=resource)

    if config.console:
        # stdout carries JSON Lines output
        exporter = ConsoleSpanExporter(out=sys.stderr)
        tracer_provider.add_span_processor(SimpleSpanProcessor(exporter))

    trace.set_tracer_provider(tracer_provider)
    _configured = True
    logger.info("OpenTelemetry tracing initialized")


def get_tracer(name: str) -> trace.Tracer:
    """Get tracer instance.

    Args:
        name: Tracer name

    Returns:
        Tracer instance
    """
    return trace.get_tracer(name)
