"""Honest approximation of quantum noise channels by efficiently simulable mixtures."""

__version__ = "0.1.0"
