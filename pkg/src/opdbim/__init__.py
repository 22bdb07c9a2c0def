"""Exact computational kernel for many-sorted symmetric operads over finite sets."""

__version__ = "0.1.0"
