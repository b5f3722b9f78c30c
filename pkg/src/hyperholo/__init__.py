"""Exact symbolic calculus for Courant algebroids, hypercomplex triples and holomorphic symplectic structures."""

__version__ = "0.1.0"
