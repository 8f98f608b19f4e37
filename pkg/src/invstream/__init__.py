"""On-the-fly invariant generation for symbolic transition systems."""

__version__ = "0.1.0"
