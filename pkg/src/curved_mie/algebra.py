"""Ladder operators and the so(2,1) generators acting on sampled functions of psi.

The auxiliary angles y1, y2 are never put on a grid.  A function
exp(i nu y1) f(psi) exp(i kappa y2) is stored as the index pair (nu, kappa)
plus samples of f, so d/dy1 acts as multiplication by i*nu.  nu and kappa
are complex in general: the eigen-realizations built from a bound state have
one purely imaginary index.

Ladder operators in psi (t and J = j + s from the factorization):

    Abar^{+-}(J) = -+ i sin(psi) d/dpsi + i (J +- 1/2) cos(psi) + t sin(psi)

and the generators O_1^{+-} = -i exp(+-i y1) Abar^{-+} with (J +- 1/2, t)
read off from (nu, kappa); O_2 swaps the roles of the two indices.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from curved_mie.model import derive_constants
from curved_mie.spectrum import Level
from curved_mie.wavefunction import Grid, eval_eigenfunction, normalize


class AlgebraError(ValueError):
    pass


class Branch(str, enum.Enum):
    MODE1 = "mode1"  # t = +-(l+1), J + 1/2 = +-iA/(l+1); pairs with O_1
    MODE2 = "mode2"  # t = +-iA/(l+1), J + 1/2 = +-(l+1); pairs with O_2


@dataclass(frozen=True)
class FactorizationParams:
    s: complex
    t: complex
    ell: float
    j: float
    A: float
    branch: Branch
    epsilon: float
    signs: tuple[int, int] = (1, 1)

    @property
    def J(self) -> complex:
        return self.j + self.s

    @property
    def factorization_constant(self) -> float:
        """(j + 1/2)^2: the ladder-independent constant of the psi-space factorization."""
        return (self.j + 0.5) ** 2

    def R(self, J: complex) -> complex:
        return J * J

    @property
    def indices(self) -> tuple[complex, complex]:
        """(nu, kappa) of the function family these parameters factorize."""
        half = self.J + 0.5
        if self.branch is Branch.MODE1:
            return half, self.t
        return self.t, half


def solve_st(
    ell: float,
    A: float,
    branch: Branch | str = Branch.MODE1,
    signs: tuple[int, int] = (1, 1),
    j: float = 0.0,
) -> FactorizationParams:
    """Factorization constants for top rung ``ell``; ``signs`` = (sign of t, sign of J + 1/2)."""
    branch = Branch(branch)
    if ell + 1 <= 0:
        raise AlgebraError(f"ell + 1 must be positive, got {ell + 1}")
    st, sj = signs
    if st not in (1, -1) or sj not in (1, -1):
        raise AlgebraError(f"signs must be +-1, got {signs}")
    top = ell + 1.0
    imag = 1j * A / top
    if branch is Branch.MODE1:
        t, half = st * top + 0j, sj * imag
    else:
        if abs(A) < 1e-100 * top:
            raise AlgebraError("mode2 needs A != 0 (t would vanish)")
        t, half = st * imag, sj * top + 0j
    epsilon = (t * t - A * A / (t * t)).real
    return FactorizationParams(
        s=half - 0.5 - j, t=t, ell=ell, j=j, A=A, branch=branch, epsilon=epsilon, signs=signs
    )


def epsilon_top(ell: float, A: float) -> float:
    return (ell + 1.0) ** 2 - A * A / (ell + 1.0) ** 2


def matching_residuals(fp: FactorizationParams) -> dict[str, float]:
    """Residuals of the coefficient matching under both readings of its right-hand side."""
    J = fp.J
    lhs = fp.t**2 + J * (J + 1)
    return {
        "squared": abs(lhs - (fp.epsilon**2 - 0.25)),
        "unsquared": abs(lhs - (fp.epsilon - 0.25)),
        "cross_term": abs(fp.t * (J + 0.5) - 1j * fp.A * fp.signs[0] * fp.signs[1]),
        "epsilon_consistency": abs(fp.epsilon - epsilon_top(fp.ell, fp.A)),
    }


def d4(values: NDArray, h: float) -> NDArray:
    """First derivative: 5-point central stencil, one-sided 4th order at two nodes per end."""
    f = values
    if f.size < 5:
        raise ValueError("need at least 5 samples")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    return d


@dataclass(frozen=True, eq=False)
class GridOperator:
    """f -> deriv * f' + mult * f on a fixed grid."""

    deriv: NDArray[np.complex128]
    mult: NDArray[np.complex128]
    h: float

    def __call__(self, values: NDArray) -> NDArray[np.complex128]:
        return self.deriv * d4(np.asarray(values, dtype=complex), self.h) + self.mult * values


def ladder(
    fp: FactorizationParams, sign: int, grid: Grid, J: complex | None = None
) -> GridOperator:
    """Abar^{sign}(J) on ``grid``; J defaults to fp.J."""
    if sign not in (1, -1):
        raise AlgebraError(f"sign must be +-1, got {sign}")
    J = fp.J if J is None else J
    psi = grid.psi_values
    s, c = np.sin(psi), np.cos(psi)
    return GridOperator(
        deriv=-sign * 1j * s + 0j,
        mult=1j * (J + 0.5 * sign) * c + fp.t * s,
        h=grid.h,
    )


def _rel(r: NDArray, ref: NDArray, keep: slice) -> float:
    return float(np.linalg.norm(r[keep]) / np.linalg.norm(ref[keep]))


def _keep(grid: Grid, exclude: int) -> slice:
    return slice(exclude, grid.n_points - 1 - exclude)


def factorization_residual(
    Y: NDArray, fp: FactorizationParams, grid: Grid, which: str = "lower_raise", exclude: int = 0
) -> float:
    """Relative residual of Abar^-(J)Abar^+(J)Y = (c - J^2)Y ("lower_raise") or
    Abar^+(J+1)Abar^-(J+1)Y = (c - (J+1)^2)Y ("raise_lower"), c = (j + 1/2)^2."""
    c = fp.factorization_constant
    if which == "lower_raise":
        J = fp.J
        out = ladder(fp, -1, grid, J)(ladder(fp, 1, grid, J)(Y))
    elif which == "raise_lower":
        J = fp.J + 1
        out = ladder(fp, 1, grid, J)(ladder(fp, -1, grid, J)(Y))
    else:
        raise AlgebraError(f"which must be 'raise_lower' or 'lower_raise', got {which!r}")
    return _rel(out - (c - fp.R(J)) * Y, Y, _keep(grid, exclude))


def adjoint_residual(fp: FactorizationParams, f: NDArray, g: NDArray, grid: Grid) -> float:
    """|<Abar^+(J) f, g> - <f, Abar^-(J+1) g>| for the bilinear pairing with measure dpsi/sin(psi)."""
    w = 1.0 / np.sin(grid.psi_values)
    left = np.sum(ladder(fp, 1, grid)(f) * g * w) * grid.h
    right = np.sum(f * ladder(fp, -1, grid, fp.J + 1)(g) * w) * grid.h
    scale = max(abs(left), abs(right), 1e-300)
    return float(abs(left - right) / scale)


@dataclass(frozen=True, eq=False)
class IndexedFunction:
    """Samples ``coef * base`` of f(psi) with circle indices (nu, kappa).

    Scalar factors live in ``coef`` rather than being multiplied into the
    samples, so X-type generators (pure index bookkeeping) commute with the
    differential ones without any rounding.
    """

    nu: complex
    kappa: complex
    base: NDArray[np.complex128]
    grid: Grid
    coef: complex = 1.0

    @property
    def values(self) -> NDArray[np.complex128]:
        return self.coef * self.base

    def scaled(self, c: complex) -> IndexedFunction:
        return replace(self, coef=c * self.coef)

    def _combine(self, other: IndexedFunction, sign: int) -> IndexedFunction:
        _same_indices(self, other)
        if self.base is other.base or np.array_equal(self.base, other.base):
            return replace(self, coef=self.coef + sign * other.coef)
        return replace(self, base=self.values + sign * other.values, coef=1.0)

    def __sub__(self, other: IndexedFunction) -> IndexedFunction:
        return self._combine(other, -1)

    def __add__(self, other: IndexedFunction) -> IndexedFunction:
        return self._combine(other, 1)


def _same_indices(u: IndexedFunction, v: IndexedFunction) -> None:
    if not (cmath.isclose(u.nu, v.nu, abs_tol=1e-12) and cmath.isclose(u.kappa, v.kappa, abs_tol=1e-12)):
        raise AlgebraError(f"index mismatch: ({u.nu}, {u.kappa}) vs ({v.nu}, {v.kappa})")


def apply_X(which: int, phi: IndexedFunction) -> IndexedFunction:
    if which == 1:
        return phi.scaled(phi.nu)
    if which == 2:
        return phi.scaled(phi.kappa)
    raise AlgebraError(f"which must be 1 or 2, got {which}")


def apply_O(
    which: int, sign: int, phi: IndexedFunction, fp: FactorizationParams | None = None
) -> IndexedFunction:
    """O_which^sign from its explicit psi-form, d/dy acting through the indices."""
    if sign not in (1, -1):
        raise AlgebraError(f"sign must be +-1, got {sign}")
    if fp is not None:
        expected = Branch.MODE1 if which == 1 else Branch.MODE2
        if fp.branch is not expected:
            raise AlgebraError(f"O_{which} needs {expected.value} parameters, got {fp.branch.value}")
    psi = phi.grid.psi_values
    s, c = np.sin(psi), np.cos(psi)
    # +-sin f' - i cos (i own) f - sin (i other) f
    if which == 1:
        own, other = phi.nu, phi.kappa
    elif which == 2:
        own, other = phi.kappa, phi.nu
    else:
        raise AlgebraError(f"which must be 1 or 2, got {which}")
    f = phi.base
    vals = sign * s * d4(f, phi.grid.h) + own * c * f - 1j * other * s * f
    if which == 1:
        return IndexedFunction(phi.nu + sign, phi.kappa, vals, phi.grid, phi.coef)
    return IndexedFunction(phi.nu, phi.kappa + sign, vals, phi.grid, phi.coef)


_GENERATORS = {"X1", "X2", "O1+", "O1-", "O2+", "O2-"}


def apply_generator(name: str, phi: IndexedFunction) -> IndexedFunction:
    if name not in _GENERATORS:
        raise AlgebraError(f"unknown generator {name!r}")
    if name[0] == "X":
        return apply_X(int(name[1]), phi)
    return apply_O(int(name[1]), 1 if name[2] == "+" else -1, phi)


def _expected_commutator(p: str, q: str, phi: IndexedFunction) -> IndexedFunction | None:
    """Right-hand side of [p, q] phi from the so(2,1) relations; None means zero."""
    if p[0] == "X" and q[0] == "O":
        if p[1] != q[1]:
            return None
        sgn = 1 if q[2] == "+" else -1
        return apply_generator(q, phi).scaled(sgn)
    if p[0] == "O" and q[0] == "X":
        rhs = _expected_commutator(q, p, phi)
        return None if rhs is None else rhs.scaled(-1)
    if p[0] == "O" and q[0] == "O" and p[1] == q[1] and p[2] != q[2]:
        sgn = 1 if p[2] == "+" else -1
        return apply_X(int(p[1]), phi).scaled(-2 * sgn)
    if p[0] == "X" and q[0] == "X":
        return None
    raise AlgebraError(f"no closed-form commutator for [{p}, {q}]")


def commutator_residual(pair: tuple[str, str], phi: IndexedFunction, exclude: int = 0) -> float:
    """Relative norm of ([p, q] - expected) phi."""
    p, q = pair
    pq = apply_generator(p, apply_generator(q, phi))
    qp = apply_generator(q, apply_generator(p, phi))
    comm = pq - qp
    expected = _expected_commutator(p, q, phi)
    resid = comm.values if expected is None else (comm - expected).values
    keep = _keep(phi.grid, exclude)
    ref = np.linalg.norm(phi.values[keep])
    if expected is not None:
        ref = max(ref, float(np.linalg.norm(expected.values[keep])))
    return float(np.linalg.norm(resid[keep]) / ref)


def casimir_apply(phi: IndexedFunction, via: str = "O1") -> IndexedFunction:
    """C phi = -O^+ O^- phi + X(X - 1) phi with the O_1 or O_2 pair."""
    if via not in ("O1", "O2"):
        raise AlgebraError(f"via must be 'O1' or 'O2', got {via!r}")
    k = int(via[1])
    lowered = apply_O(k, -1, phi)
    raised = apply_O(k, 1, lowered)
    x = phi.nu if k == 1 else phi.kappa
    return IndexedFunction(phi.nu, phi.kappa, -raised.values + x * (x - 1) * phi.values, phi.grid)


def casimir_eigencheck(
    phi: IndexedFunction, j: float, via: str = "O1", exclude: int = 0
) -> float:
    c = casimir_apply(phi, via)
    keep = _keep(phi.grid, exclude)
    return _rel(c.values - j * (j + 1) * phi.values, phi.values, keep)


def eigen_realization(
    lv: Level,
    grid: Grid,
    branch: Branch | str = Branch.MODE1,
    signs: tuple[int, int] = (1, 1),
) -> tuple[IndexedFunction, FactorizationParams]:
    """Phi_{nu,kappa} built from phi = sin(psi) Psi_n of a bound state.

    The top rung is ell = n + j - 1, so that epsilon = (ell+1)^2 - A^2/(ell+1)^2
    reproduces the level's reduced energy.
    """
    A = derive_constants(lv.params, lv.m).A
    fp = solve_st(lv.nj - 1.0, A, branch, signs, j=lv.j)
    w = normalize(eval_eigenfunction(lv, grid))
    phi = w.values * np.sin(grid.psi_values)
    nu, kappa = fp.indices
    return IndexedFunction(nu, kappa, phi, grid), fp


def default_signs(ell: float, A: float, branch: Branch | str) -> tuple[int, int]:
    """Sign pair maximizing Re(j + s); ties go to (+1, +1)."""
    best: tuple[float, tuple[int, int]] | None = None
    for signs in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        try:
            fp = solve_st(ell, A, branch, signs)
        except AlgebraError:
            continue
        key = fp.J.real
        if best is None or key > best[0] + 1e-12:
            best = (key, signs)
    if best is None:
        raise AlgebraError("no admissible sign combination")
    return best[1]


def reduced_energy(lv: Level) -> float:
    """C1 + 1 of a level: the constant term of the reduced psi equation."""
    p = lv.params
    return 2.0 * p.mu * p.R**2 / p.hbar**2 * lv.energy + p.coupling + 1.0


def check_top_rung(lv: Level) -> float:
    """|(C1 + 1) - epsilon_top(n + j - 1, A)| for a level."""
    A = derive_constants(lv.params, lv.m).A
    return abs(reduced_energy(lv) - epsilon_top(lv.nj - 1.0, A))


