"""Exact toric and C*-action computations behind rooftop flips."""

__version__ = "0.3.0"
