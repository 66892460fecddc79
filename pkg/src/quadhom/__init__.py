"""Exact computations with quadric points, elementary orthogonal actions and homotopy certificates."""

__version__ = "0.1.0"
