"""Evaluation: reference oracle, prediction metrics and timing."""
