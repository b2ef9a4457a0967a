"""Numerical toolkit for the boundary shared by the quantum and no-signaling sets
in the CHSH scenario."""

__version__ = "0.1.0"
