"""Closed-form bound-state spectrum on the sphere.

Three constant sets are carried side by side (see :class:`SolvabilityMode`);
which of them reproduces the finite-difference oracle is decided in
:mod:`curved_mie.verify`, not here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from curved_mie.model import DerivedConstants, DomainError, PhysicalParams, derive_constants
from curved_mie.specfun import JacobiParams


class SolvabilityMode(str, enum.Enum):
    """Which constants enter the j-formula and the energy.

    ``PAPER_LITERAL``: j(j+1) = m(m+1) + g + 3/2 (7/4 under the root), energy
    offset 9/4.
    ``REDERIVED``: j(j+1) = C2 + 2, energy offset 9/4 -- the same chain with
    the published reduced equation held fixed.
    ``DIRECT``: the reduced equation redone from psi'' + psi substitution,
    j(j+1) = C2 and energy offset 1.
    """

    PAPER_LITERAL = "paper_literal"
    REDERIVED = "rederived"
    DIRECT = "direct"


# Mode whose energies match the oracle; re-checked by the verify suite.
VALIDATED_MODE = SolvabilityMode.DIRECT

_ROOT_OFFSET = {
    SolvabilityMode.PAPER_LITERAL: 7.0 / 4.0,
    SolvabilityMode.REDERIVED: 9.0 / 4.0,
    SolvabilityMode.DIRECT: 1.0 / 4.0,
}
_ENERGY_OFFSET = {
    SolvabilityMode.PAPER_LITERAL: 9.0 / 4.0,
    SolvabilityMode.REDERIVED: 9.0 / 4.0,
    SolvabilityMode.DIRECT: 1.0,
}


class NoBoundChannelError(DomainError):
    pass


class SingularLevelError(DomainError):
    pass


@dataclass(frozen=True)
class Level:
    """One bound state.  ``n`` starts at 1; the Jacobi degree is ``n - 1``."""

    n: int
    m: int
    j: float
    alpha_n: float
    beta_n: float
    jacobi: JacobiParams
    energy: float
    mode: SolvabilityMode
    params: PhysicalParams

    @property
    def degree(self) -> int:
        return self.n - 1

    @property
    def nj(self) -> float:
        return self.n + self.j

    @property
    def constants(self) -> DerivedConstants:
        return derive_constants(self.params, self.m)


def compute_j(m: int, p: PhysicalParams, mode: SolvabilityMode = VALIDATED_MODE) -> float:
    mode = SolvabilityMode(mode)
    disc = m * (m + 1) + p.coupling + _ROOT_OFFSET[mode]
    if disc < 0:
        raise NoBoundChannelError(
            f"negative discriminant {disc:.6g} for m={m} in mode {mode.value}"
        )
    return -0.5 + math.sqrt(disc)


def jacobi_params(alpha: float, beta: float) -> JacobiParams:
    """Jacobi parameters after the z = i t continuation (alpha -> i alpha)."""
    return JacobiParams(complex(beta - 1, -0.5 * alpha), complex(beta - 1, 0.5 * alpha))


def level(
    n: int, m: int, p: PhysicalParams, mode: SolvabilityMode = VALIDATED_MODE
) -> Level:
    if n < 1:
        raise DomainError(f"n starts at 1, got {n}")
    mode = SolvabilityMode(mode)
    c = derive_constants(p, m)
    j = compute_j(m, p, mode)
    nj = n + j
    if abs(nj) < 1e-14:
        raise SingularLevelError(f"n + j = 0 for n={n}, m={m}")
    alpha = c.C3 / nj
    beta = 1.0 - nj
    bracket = nj**2 - c.C3**2 / (4.0 * nj**2) - p.coupling - _ENERGY_OFFSET[mode]
    return Level(
        n=n,
        m=c.m,
        j=j,
        alpha_n=alpha,
        beta_n=beta,
        jacobi=jacobi_params(alpha, beta),
        energy=p.energy_scale * bracket,
        mode=mode,
        params=p,
    )


def enumerate_levels(
    n_max: int, m: int, p: PhysicalParams, mode: SolvabilityMode = VALIDATED_MODE
) -> list[Level]:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    levels = [level(n, m, p, mode) for n in range(1, n_max + 1)]
    return sorted(levels, key=lambda lv: (lv.energy, lv.n))


@dataclass(frozen=True)
class FlatLimit:
    literal: float
    curvature_limit: float


def flat_limit_energy(n: int, j: float, p: PhysicalParams) -> FlatLimit:
    """R -> infinity energies: the uncorrected prefactor (mu^2 a^2 V0^2 / hbar^4) and the actual limit of the spectrum."""
    nj = n + j
    if nj <= 0:
        raise DomainError(f"n + j must be > 0, got {nj}")
    literal = -(p.mu**2 * p.a**2 * p.V0**2 / p.hbar**4) / nj**2
    limit = -(p.mu * p.a**2 * p.V0**2 / (2.0 * p.hbar**2)) / nj**2
    return FlatLimit(literal=literal, curvature_limit=limit)


def quantization_residual(n: int, beta: float, j: float) -> float:
    """|k(k + 2 beta - 1) - beta(1 - beta) - j(j + 1)| with degree k = n - 1."""
    k = n - 1
    return abs(k * (k + 2.0 * beta - 1.0) - (beta * (1.0 - beta) + j * (j + 1.0)))
