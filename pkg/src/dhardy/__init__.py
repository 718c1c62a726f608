"""Numerics for a discrete Hardy uncertainty principle on the mesh hZ."""

__version__ = "0.1.0"
