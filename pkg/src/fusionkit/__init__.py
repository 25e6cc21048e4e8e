"""Affine fusion rules by folding, Verlinde sums and lattice-point counting."""

__version__ = "0.1.0"
