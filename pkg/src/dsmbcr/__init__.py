"""Belief conditioning rules and fusion over DSm hyper-power sets."""

__version__ = "0.1.0"
