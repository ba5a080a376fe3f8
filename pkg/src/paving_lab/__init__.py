"""Finite-dimensional paving experiments: frames, reflections, symmetries and Laurent truncations."""

__version__ = "0.1.0"
