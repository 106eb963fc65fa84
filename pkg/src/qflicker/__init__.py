"""Quantum flicker-noise predictions for biased conducting samples."""

__version__ = "0.1.0"
