"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    geometry: float = 1e-9
    integration: float = 1e-8
    normalization: float = 1e-12
    # |cz+d| below this switches to the chart at infinity
    pole: float = 1e-8
    derivative: float = 1e-7
    # allowed gap between one-sided difference quotients at the finest step
    two_sided: float = 1e-4


TOL = Tolerances()
