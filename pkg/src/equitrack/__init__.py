"""Equivariant trajectory tracking for Euler-Poincare systems on matrix Lie groups."""

__version__ = "0.1.0"
