"""Forward and inverse scattering of time-harmonic elastic waves by a 2D inclusion."""

__version__ = "0.1.0"
