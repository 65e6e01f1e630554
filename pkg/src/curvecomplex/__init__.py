"""Exact curve-complex machinery: normal coordinates, subsurface projections,
Dehn-twist dynamics, and the bounds-projections convergence criterion."""

__version__ = "0.1.0"
