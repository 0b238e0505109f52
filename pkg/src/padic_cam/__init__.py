"""Symplectic normal forms of a p-adic coupled angular momentum system."""

__version__ = "0.1.0"
