"""Occluder-aided non-line-of-sight imaging: forward model, priors,
reconstruction, measurement design and a reproducible experiment harness."""

__version__ = "0.1.0"
