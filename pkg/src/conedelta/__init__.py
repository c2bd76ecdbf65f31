"""Spectra of Schrodinger operators with delta-interactions on sharp circular cones."""

from .constants import ModelConstants, solve_model_constants

__all__ = ["ModelConstants", "solve_model_constants"]
__version__ = "0.1.0"
