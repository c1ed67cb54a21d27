"""Eigenfunctions on the sphere, the chain of substitutions behind them, and
quadrature under the radial measure sin^2(psi) dpsi."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import simpson

from curved_mie.model import PhysicalParams, v_curved
from curved_mie.specfun import jacobi_homogeneous
from curved_mie.spectrum import Level


class ZeroNormError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid:
    """Open uniform grid psi_i = i*pi/N, i = 1..N-1 (poles excluded)."""

    n_points: int

    def __post_init__(self) -> None:
        if self.n_points < 4 or self.n_points % 2:
            raise ValueError(f"N must be even and >= 4, got {self.n_points}")

    @property
    def h(self) -> float:
        return math.pi / self.n_points

    @property
    def psi_values(self) -> NDArray[np.float64]:
        return np.arange(1, self.n_points) * self.h


@dataclass(frozen=True, eq=False)
class WaveSample:
    grid: Grid
    values: NDArray[np.complex128]
    norm: float
    log_scale: float = 0.0


def radial_integral(grid: Grid, integrand: NDArray) -> complex:
    """Composite Simpson over [0, pi]; the integrand is taken as zero at both poles."""
    full = np.zeros(grid.n_points + 1, dtype=np.result_type(integrand, float))
    full[1:-1] = integrand
    return complex(simpson(full, dx=grid.h))


def _norm(grid: Grid, values: NDArray) -> float:
    s = np.sin(grid.psi_values)
    return radial_integral(grid, np.abs(values) ** 2 * s * s).real


def eval_eigenfunction(level: Level, grid: Grid, exponent: str = "continued") -> WaveSample:
    """Un-normalized Psi_n(psi) of ``level`` on ``grid``.

    Evaluated as exp(-alpha psi/2) sin^j(psi) Q(psi), where Q = sin^k P_k(-i cot psi)
    with k = n - 1 comes from :func:`jacobi_homogeneous`, so nothing overflows
    at the poles.  ``exponent="literal"`` uses exp(-i alpha psi/2) with the real
    alpha_n instead; that variant does not solve the equation and exists for
    comparison.
    """
    if level.nj <= 1.0:
        warnings.warn(
            f"n + j = {level.nj:.4g} <= 1: Psi does not vanish at the poles",
            RuntimeWarning,
            stacklevel=2,
        )
    psi = grid.psi_values
    s = np.sin(psi)
    q = jacobi_homogeneous(level.degree, level.jacobi, s, -1j * np.cos(psi))
    if exponent == "continued":
        log_exp = -0.5 * level.alpha_n * psi + 0j
    elif exponent == "literal":
        log_exp = -0.5j * level.alpha_n * psi
    else:
        raise ValueError(f"unknown exponent convention {exponent!r}")
    with np.errstate(divide="ignore"):
        log_mag = log_exp.real + level.j * np.log(s) + np.log(np.abs(q))
    phase = log_exp.imag + np.angle(q)
    peak = float(np.max(log_mag[np.isfinite(log_mag)]))
    shift = peak if peak > 600.0 else 0.0
    values = np.exp(log_mag - shift) * np.exp(1j * phase)
    return WaveSample(grid=grid, values=values, norm=_norm(grid, values), log_scale=shift)


def normalize(w: WaveSample) -> WaveSample:
    """Unit norm under sin^2(psi) dpsi, phase real-positive at the first interior peak of |Psi|."""
    if not w.norm > 0:
        raise ZeroNormError("cannot normalize a zero sample")
    values = w.values / math.sqrt(w.norm)
    mag = np.abs(values)
    interior = (mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:]) & (mag[1:-1] > 1e-2 * mag.max())
    peaks = np.flatnonzero(interior) + 1
    anchor = int(peaks[0]) if peaks.size else int(np.argmax(mag))
    values = values * np.exp(-1j * np.angle(values[anchor]))
    return replace(w, values=values, norm=_norm(w.grid, values))


def overlap(w1: WaveSample, w2: WaveSample) -> complex:
    s = np.sin(w1.grid.psi_values)
    return radial_integral(w1.grid, np.conj(w1.values) * w2.values * s * s)


def psi_to_phi(values: NDArray, psi: NDArray) -> NDArray:
    return values * np.sin(psi)


def phi_to_psi(values: NDArray, psi: NDArray) -> NDArray:
    return values / np.sin(psi)


def phi_to_F(phi: NDArray, alpha: float, psi: NDArray) -> NDArray:
    return np.exp(0.5 * alpha * psi) * phi


def F_to_phi(F: NDArray, alpha: float, psi: NDArray) -> NDArray:
    return np.exp(-0.5 * alpha * psi) * F


def F_to_f(F: NDArray, beta: float, psi: NDArray) -> NDArray:
    # (1 + cot^2)^((1 - beta)/2) = sin^(beta - 1)
    return F * np.sin(psi) ** (beta - 1.0)


def f_to_F(f: NDArray, beta: float, psi: NDArray) -> NDArray:
    return f * np.sin(psi) ** (1.0 - beta)


def equation_residual(
    w: WaveSample,
    E: float,
    p: PhysicalParams,
    m: int,
    exclude: int = 5,
    margin: float | None = None,
) -> float:
    """Relative L2 residual of the radial Schroedinger equation applied to ``w``.

    The operator (1/sin^2)d/dpsi(sin^2 d/dpsi) uses the conservative 3-point
    stencil.  Points within ``exclude`` nodes of a pole are dropped, or, when
    ``margin`` is given, those closer than ``margin`` radians.  The result is
    normalized by the norm of the kinetic term over the same points (or by
    the norm of the potential term or of Psi itself, whichever is largest, so
    that a constant Psi does not give 0/0).
    """
    grid = w.grid
    if grid.n_points < 512:
        raise ValueError("equation_residual needs N >= 512")
    h = grid.h
    psi = grid.psi_values
    s = np.sin(psi)
    u = np.concatenate(([0.0], w.values, [0.0]))
    s_half = np.sin((np.arange(grid.n_points) + 0.5) * h) ** 2
    flux = s_half * np.diff(u) / h
    kinetic = np.diff(flux) / h / (s * s)
    k2 = 2.0 * p.mu * p.R**2 / p.hbar**2
    bracket = k2 * (E - v_curved(psi, p)) - m * (m + 1) / (s * s)
    resid = kinetic + bracket * w.values
    if margin is None:
        keep = np.zeros(psi.size, dtype=bool)
        keep[exclude : psi.size - exclude] = True
    else:
        keep = (psi >= margin) & (psi <= math.pi - margin)
    scale = max(
        np.linalg.norm(kinetic[keep]),
        np.linalg.norm((bracket * w.values)[keep]),
        np.linalg.norm(w.values[keep]),
    )
    return float(np.linalg.norm(resid[keep]) / scale)


def boundary_decay_exponent(w: WaveSample, count: int = 20) -> float:
    """Least-squares slope of log|Psi| against log(sin psi) over the ``count`` nodes nearest psi = 0."""
    psi = w.grid.psi_values[:count]
    mag = np.abs(w.values[:count])
    slope, _ = np.polyfit(np.log(np.sin(psi)), np.log(mag), 1)
    return float(slope)
