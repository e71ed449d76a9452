"""Direct imaging of 2D scattering obstacles from phaseless far-field data."""

__version__ = "0.1.0"
