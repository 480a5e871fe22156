"""Data-driven construction of certified robust positively invariant tubes."""

__version__ = "0.1.0"
