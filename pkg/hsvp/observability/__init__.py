"""Observability module for metrics and tracing."""
