"""Singular-value asymptotics of the finite Hilbert transform on several intervals."""

__version__ = "0.1.0"
