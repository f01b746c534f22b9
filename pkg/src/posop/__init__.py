"""Symbolic and numerical checks for relativistic position operators."""

__version__ = "0.1.0"
