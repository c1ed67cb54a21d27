"""Physical parameters, 3-sphere geometry and the Kratzer-type Mie potential.

Everything here is plain closed-form arithmetic.  Angles are radians, and with
the default ``hbar = mu = 1`` every quantity is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional inputs shared by every formula.

    ``V0`` is the well strength of the k = 1 Mie (Kratzer) form; build from a
    pair-interaction depth with :meth:`from_depth`.
    """

    hbar: float = 1.0
    mu: float = 1.0
    R: float = 1.0
    a: float = 1.0
    V0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hbar", "mu", "R", "a"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.V0):
            raise DomainError(f"V0 must be finite, got {self.V0!r}")

    @classmethod
    def from_depth(cls, epsilon: float, k: float = 1.0, **kw: float) -> PhysicalParams:
        """Parameters from the interaction energy ``epsilon`` with V0 = 2*epsilon*k."""
        return cls(V0=2.0 * epsilon * k, **kw)

    @property
    def is_free(self) -> bool:
        return self.V0 == 0

    @property
    def coupling(self) -> float:
        """mu*V0*a^2/hbar^2, the dimensionless strength of the 1/r^2 term."""
        return self.mu * self.V0 * self.a**2 / self.hbar**2

    @property
    def energy_scale(self) -> float:
        """hbar^2/(2 mu R^2)."""
        return self.hbar**2 / (2.0 * self.mu * self.R**2)


@dataclass(frozen=True)
class SpherePoint:
    psi: float
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.psi <= math.pi:
            raise DomainError(f"psi out of [0, pi]: {self.psi}")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta out of [0, pi]: {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"phi out of [0, 2pi): {self.phi}")


@dataclass(frozen=True)
class EmbeddedPoint:
    """Cartesian coordinates in R^4; ``zeta[3]`` is the pole coordinate."""

    zeta: tuple[float, float, float, float]

    @property
    def norm2(self) -> float:
        return math.fsum(x * x for x in self.zeta)


@dataclass(frozen=True)
class DerivedConstants:
    C2: float
    C3: float
    A: float
    m: int


def v_flat(r: ArrayLike, p: PhysicalParams) -> NDArray[np.float64] | float:
    """Flat-space potential V0*(a^2/(2 r^2) - a/r)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("v_flat needs r > 0")
    x = p.a / r_arr
    out = p.V0 * (0.5 * x * x - x)
    return float(out) if out.ndim == 0 else out


def v_curved(psi: ArrayLike, p: PhysicalParams) -> NDArray[np.float64] | float:
    """Potential on the sphere, V0*((a cot(psi)/R)^2/2 - a cot(psi)/R)."""
    psi_arr = np.asarray(psi, dtype=float)
    if np.any((psi_arr <= 0) | (psi_arr >= math.pi)):
        raise DomainError("v_curved is singular at psi = 0 and psi = pi")
    x = p.a * np.cos(psi_arr) / (p.R * np.sin(psi_arr))
    out = p.V0 * (0.5 * x * x - x)
    return float(out) if out.ndim == 0 else out


def psi_of_r(r: ArrayLike, R: float) -> NDArray[np.float64] | float:
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("psi_of_r needs r >= 0")
    out = np.arctan(r_arr / R)
    return float(out) if out.ndim == 0 else out


def r_of_psi(psi: ArrayLike, R: float) -> NDArray[np.float64] | float:
    """Flat chart r = R tan(psi); only covers the half-sphere psi < pi/2."""
    psi_arr = np.asarray(psi, dtype=float)
    if np.any((psi_arr < 0) | (psi_arr >= 0.5 * math.pi)):
        raise DomainError("r_of_psi needs psi in [0, pi/2)")
    out = R * np.tan(psi_arr)
    return float(out) if out.ndim == 0 else out


def embed(pt: SpherePoint, R: float) -> EmbeddedPoint:
    s = R * math.sin(pt.psi)
    return EmbeddedPoint(
        (
            s * math.sin(pt.theta) * math.cos(pt.phi),
            s * math.sin(pt.theta) * math.sin(pt.phi),
            s * math.cos(pt.theta),
            R * math.cos(pt.psi),
        )
    )


def derive_constants(p: PhysicalParams, m: int) -> DerivedConstants:
    if m < 0 or int(m) != m:
        raise DomainError(f"m must be a nonnegative integer, got {m!r}")
    m = int(m)
    g = p.coupling
    C3 = 2.0 * p.mu * p.R * p.a * p.V0 / p.hbar**2
    return DerivedConstants(C2=m * (m + 1) + g, C3=C3, A=-0.5 * C3, m=m)


def c1_of_energy(E: float, p: PhysicalParams) -> float:
    return (2.0 * p.mu * p.R**2 / p.hbar**2) * (E + p.a**2 * p.V0 / (2.0 * p.R**2))


def energy_of_c1(C1: float, p: PhysicalParams) -> float:
    return C1 * p.hbar**2 / (2.0 * p.mu * p.R**2) - p.a**2 * p.V0 / (2.0 * p.R**2)
