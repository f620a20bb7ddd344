"""Computational checks for the inductive Alperin-McKay condition in type C."""

__version__ = "0.1.0"
