"""Repeat-until-success arithmetic on rotation angles: a small state-vector
simulator, the gearbox and PAR primitives, function synthesis, and T-count
cost models."""

__version__ = "0.1.0"
