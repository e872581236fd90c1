"""Exact finite-resolution measure tools on dyadic sets and interval families."""
