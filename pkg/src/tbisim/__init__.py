"""Timed bisimulation checking with virtual clocks."""

__version__ = "0.1.0"
