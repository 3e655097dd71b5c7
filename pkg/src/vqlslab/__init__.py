"""Desk-scale laboratory for variational quantum linear solvers."""

__version__ = "0.1.0"
