"""Reachability of vulnerable dependency functions in JavaScript projects."""

__version__ = "0.1.0"
