"""Computational workbench for d*-spaces, strong d-spaces and their relatives."""

__version__ = "0.1.0"
