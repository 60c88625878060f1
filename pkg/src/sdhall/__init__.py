"""Exact toolkit for twisted semi-derived Hall algebras of quivers with loops."""
__version__ = "0.1.0"
