"""Exact prismal-monoid toolkit."""

__version__ = "0.3.0"
