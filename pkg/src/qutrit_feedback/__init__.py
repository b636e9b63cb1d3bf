"""Continuous error correction of dissipative qutrits by local measurement and feedback."""
from . import analysis, channels, codes, qcore, trajectories  # noqa: F401

__version__ = "0.1.0"
