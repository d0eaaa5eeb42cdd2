"""Numerical stability experiments for J*-homomorphisms between matrix J*-algebras."""

__version__ = "0.1.0"
