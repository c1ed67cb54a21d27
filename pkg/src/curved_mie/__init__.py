"""Bound states of the Mie (Kratzer) potential on a 3-sphere of radius R.

Closed-form spectrum and eigenfunctions, a finite-difference reference
solver, and the ladder-operator / so(2,1) structure of the radial problem.
"""

from curved_mie.model import DomainError, PhysicalParams
from curved_mie.spectrum import VALIDATED_MODE, Level, SolvabilityMode, enumerate_levels, level

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Level",
    "PhysicalParams",
    "SolvabilityMode",
    "VALIDATED_MODE",
    "enumerate_levels",
    "level",
]
