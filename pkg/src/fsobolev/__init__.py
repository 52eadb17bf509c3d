"""Concentration operators on the Fourier-symmetric Sobolev space and the weighted Paley-Wiener space."""

__version__ = "0.1.0"
