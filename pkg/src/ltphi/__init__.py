"""Exact desk-scale computations with Lubin-Tate formal groups and (phi, Gamma)-modules."""

__version__ = "0.1.0"
