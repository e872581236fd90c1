"""Computational toolkit for hyperbolic 3-space, bi-Lipschitz maps,
boundary homeomorphisms and finite-resolution measure theory."""

__version__ = "0.1.0"
