"""hsvp - Bayes-optimal set-valued prediction over class hierarchies."""

__version__ = "0.1.0"
