"""Finite-difference ground truth for the radial equations.

The curved problem is discretized in phi = sin(psi) Psi, which turns the
Laplace-Beltrami radial part into phi'' + phi exactly, so the operator is

    H phi = -s phi'' + [s (m(m+1)/sin^2 psi - 1) + V(psi)] phi,   s = hbar^2/(2 mu R^2),

with Dirichlet ends.  The flat problem is the usual u = r Psi reduction.
Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
iteration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numba
import numpy as np
from numpy.typing import NDArray
from scipy.linalg import LinAlgError, solve_banded

from curved_mie.model import PhysicalParams, v_curved, v_flat

log = logging.getLogger(__name__)


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    diagonal: NDArray[np.float64]
    off_diagonal: NDArray[np.float64]
    x: NDArray[np.float64]
    h: float
    scale: float

    def __post_init__(self) -> None:
        if self.off_diagonal.size != self.diagonal.size - 1:
            raise ValueError("off-diagonal must be one shorter than the diagonal")
        if not (np.all(np.isfinite(self.diagonal)) and np.all(np.isfinite(self.off_diagonal))):
            raise ValueError("operator entries must be finite")

    @property
    def size(self) -> int:
        return self.diagonal.size

    def matvec(self, v: NDArray) -> NDArray:
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out

    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        e = np.abs(self.off_diagonal)
        radius = np.abs(self.diagonal).copy()
        radius[:-1] += e
        radius[1:] += e
        return float(radius.max())


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64] | None
    grid_size: int
    extrapolated: bool = False


def assemble_curved(p: PhysicalParams, m: int, N: int) -> TridiagonalOperator:
    if N < 64 or N % 2:
        raise ValueError(f"N must be even and >= 64, got {N}")
    h = math.pi / N
    psi = np.arange(1, N) * h
    s = p.energy_scale
    sin2 = np.sin(psi) ** 2
    diag = s * (2.0 / h**2 + m * (m + 1) / sin2 - 1.0) + v_curved(psi, p)
    off = np.full(N - 2, -s / h**2)
    return TridiagonalOperator(diag, off, psi, h, s)


def assemble_flat(p: PhysicalParams, m: int, N: int, r_max: float) -> TridiagonalOperator:
    h = r_max / N
    r = np.arange(1, N) * h
    s = p.hbar**2 / (2.0 * p.mu)
    diag = s * (2.0 / h**2 + m * (m + 1) / r**2) + v_flat(r, p)
    off = np.full(N - 2, -s / h**2)
    return TridiagonalOperator(diag, off, r, h, s)


@numba.njit(cache=True, nogil=True)
def _sturm_count(d, e2, x):
    # Number of eigenvalues strictly below x.
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, d.size):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@numba.njit(cache=True, nogil=True)
def _bisect_lowest(d, e2, k, lo, hi, tol):
    out = np.empty(k)
    for i in range(k):
        a = lo if i == 0 else out[i - 1]
        b = hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _sturm_count(d, e2, mid) >= i + 1:
                b = mid
            else:
                a = mid
        out[i] = 0.5 * (a + b)
    return out


def sturm_count(op: TridiagonalOperator, x: float) -> int:
    return int(_sturm_count(op.diagonal, op.off_diagonal**2, float(x)))


def lowest_k(op: TridiagonalOperator, k: int, tol: float = 1e-12) -> EigenResult:
    if k < 1 or (op.size >= 8 and k >= op.size / 4) or k > op.size:
        raise OracleError(f"k={k} too large for operator of size {op.size}")
    e = np.abs(op.off_diagonal)
    lo = float(np.min(op.diagonal - np.concatenate(([0.0], e)) - np.concatenate((e, [0.0]))))
    hi = float(np.max(op.diagonal + np.concatenate(([0.0], e)) + np.concatenate((e, [0.0]))))
    vals = _bisect_lowest(op.diagonal, op.off_diagonal**2, k, lo - 1.0, hi + 1.0, tol)
    return EigenResult(eigenvalues=vals, eigenvectors=None, grid_size=op.size + 1)


def eigenvector(
    op: TridiagonalOperator, eigenvalue: float, tol: float = 1e-12, iterations: int = 4
) -> NDArray[np.float64]:
    """Inverse iteration from a fixed seeded start; unit 2-norm, first significant entry positive."""
    n = op.size
    ab = np.zeros((3, n))
    ab[0, 1:] = op.off_diagonal
    ab[2, :-1] = op.off_diagonal
    v = np.random.default_rng(12345).standard_normal(n)
    v /= np.linalg.norm(v)
    shift = eigenvalue
    for attempt in range(6):
        ab[1] = op.diagonal - shift
        try:
            with np.errstate(all="ignore"):
                for _ in range(iterations):
                    v = solve_banded((1, 1), ab, v)
                    v /= np.linalg.norm(v)
        except (LinAlgError, ValueError):
            if attempt == 5:
                raise OracleError(f"inverse iteration broke down near {eigenvalue}") from None
            shift = eigenvalue + (attempt + 1) * max(tol, 1e-14 * abs(eigenvalue))
            continue
        if np.all(np.isfinite(v)):
            break
    else:
        raise OracleError(f"inverse iteration broke down near {eigenvalue}")
    lead = np.flatnonzero(np.abs(v) > 1e-3 * np.abs(v).max())[0]
    if v[lead] < 0:
        v = -v
    return v


def eigenpairs(op: TridiagonalOperator, k: int, tol: float = 1e-12) -> EigenResult:
    """Lowest k eigenvalues with eigenvectors normalized so that sum(v^2) h = 1."""
    res = lowest_k(op, k, tol)
    vecs = np.array([eigenvector(op, lam, tol) for lam in res.eigenvalues]) / math.sqrt(op.h)
    return EigenResult(res.eigenvalues, vecs, res.grid_size)


def extrapolate(coarse: EigenResult, fine: EigenResult) -> EigenResult:
    """Richardson step (4 fine - coarse)/3 for an O(h^2) error."""
    if coarse.eigenvalues.size != fine.eigenvalues.size:
        raise OracleError("coarse and fine results hold different numbers of eigenvalues")
    vals = (4.0 * fine.eigenvalues - coarse.eigenvalues) / 3.0
    return EigenResult(vals, None, fine.grid_size, extrapolated=True)


def curved_spectrum(
    p: PhysicalParams, m: int, k: int, N: int = 8192, tol: float = 1e-12
) -> EigenResult:
    """Extrapolated lowest-k curved eigenvalues from grids N and 2N."""
    coarse = lowest_k(assemble_curved(p, m, N), k, tol)
    fine = lowest_k(assemble_curved(p, m, 2 * N), k, tol)
    return extrapolate(coarse, fine)


def flat_spectrum(
    p: PhysicalParams, m: int, k: int, N: int = 16384, r_max: float | None = None,
    tol: float = 1e-13,
) -> EigenResult:
    """Extrapolated lowest-k bound energies of the flat radial problem.

    ``r_max`` defaults to a box sized from the exact Kratzer ground-state decay
    length; a warning is logged when the eigenvector has not decayed to 1e-10
    at the box edge.
    """
    if r_max is None:
        r_max = default_r_max(p, m, k)
    coarse_op = assemble_flat(p, m, N, r_max)
    coarse = lowest_k(coarse_op, k, tol)
    fine = lowest_k(assemble_flat(p, m, 2 * N, r_max), k, tol)
    edge = boundary_amplitude(coarse_op, coarse.eigenvalues[-1])
    if edge > 1e-10:
        log.warning("flat box r_max=%g truncates state %d: edge amplitude %.3g", r_max, k, edge)
    return extrapolate(coarse, fine)


def default_r_max(p: PhysicalParams, m: int, k: int) -> float:
    lam = 0.5 + math.sqrt(m * (m + 1) + p.coupling + 0.25)
    kappa = abs(p.mu * p.a * p.V0 / p.hbar**2) / (k - 1 + lam)
    # u ~ r^(k+lam) exp(-kappa r); 40 decay lengths plus the polynomial prefactor
    return max(40.0, (40.0 + 2.0 * (k + lam) * math.log(k + lam + 1.0)) / max(kappa, 1e-3))


def boundary_amplitude(op: TridiagonalOperator, eigenvalue: float) -> float:
    v = eigenvector(op, eigenvalue)
    return float(np.abs(v[-1]) / np.abs(v).max())
