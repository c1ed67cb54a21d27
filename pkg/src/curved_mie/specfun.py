"""Jacobi polynomials for complex parameters and complex argument.

Values come from the forward three-term recurrence in the degree, normalized
so that P_n(1) = binom(n + a, n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

_DEGENERATE = 1e-300


class JacobiParameterError(ValueError):
    pass


@dataclass(frozen=True)
class JacobiParams:
    a: complex
    b: complex

    def shifted(self, da: float = 1.0, db: float = 1.0) -> JacobiParams:
        return JacobiParams(self.a + da, self.b + db)


def _coefficients(k: int, a: complex, b: complex) -> tuple[complex, complex, complex, complex]:
    c = 2 * k + a + b
    a1 = 2 * k * (k + a + b) * (c - 2)
    if abs(a1) < _DEGENERATE:
        raise JacobiParameterError(
            f"recurrence denominator vanishes at degree {k} for a={a!r}, b={b!r}"
        )
    a2 = (c - 1) * (a * a - b * b)
    a3 = (c - 2) * (c - 1) * c
    a4 = 2 * (k + a - 1) * (k + b - 1) * c
    return a1, a2, a3, a4


def jacobi_eval(n: int, jp: JacobiParams, z: ArrayLike) -> NDArray[np.complex128] | complex:
    if n < 0:
        raise JacobiParameterError(f"degree must be >= 0, got {n}")
    z_arr = np.asarray(z, dtype=complex)
    a, b = complex(jp.a), complex(jp.b)
    p_prev = np.ones_like(z_arr)
    if n == 0:
        out = p_prev
    else:
        p = 0.5 * (a - b) + 0.5 * (a + b + 2) * z_arr
        for k in range(2, n + 1):
            a1, a2, a3, a4 = _coefficients(k, a, b)
            p_prev, p = p, ((a2 + a3 * z_arr) * p - a4 * p_prev) / a1
        out = p
    return complex(out) if out.ndim == 0 else out


def jacobi_homogeneous(
    n: int, jp: JacobiParams, s: ArrayLike, w: ArrayLike
) -> NDArray[np.complex128]:
    """s**n * P_n(w/s), evaluated without dividing by s.

    Bounded wherever s and w are; used with s = sin(psi), w = -i cos(psi) so
    that the pole singularity of cot(psi) never appears.
    """
    s_arr = np.asarray(s, dtype=complex)
    w_arr = np.asarray(w, dtype=complex)
    a, b = complex(jp.a), complex(jp.b)
    q_prev = np.ones(np.broadcast(s_arr, w_arr).shape, dtype=complex)
    if n == 0:
        return q_prev
    q = 0.5 * (a - b) * s_arr + 0.5 * (a + b + 2) * w_arr
    s2 = s_arr * s_arr
    for k in range(2, n + 1):
        a1, a2, a3, a4 = _coefficients(k, a, b)
        q_prev, q = q, ((a2 * s_arr + a3 * w_arr) * q - a4 * s2 * q_prev) / a1
    return q


def jacobi_deriv(n: int, jp: JacobiParams, z: ArrayLike) -> NDArray[np.complex128] | complex:
    """dP_n/dz = (n + a + b + 1)/2 * P_{n-1}^{(a+1, b+1)}."""
    if n == 0:
        z_arr = np.asarray(z, dtype=complex)
        out = np.zeros_like(z_arr)
        return complex(out) if out.ndim == 0 else out
    return 0.5 * (n + jp.a + jp.b + 1) * jacobi_eval(n - 1, jp.shifted(), z)


def jacobi_deriv2(n: int, jp: JacobiParams, z: ArrayLike) -> NDArray[np.complex128] | complex:
    if n < 2:
        z_arr = np.asarray(z, dtype=complex)
        out = np.zeros_like(z_arr)
        return complex(out) if out.ndim == 0 else out
    return 0.5 * (n + jp.a + jp.b + 1) * jacobi_deriv(n - 1, jp.shifted(), z)


def jacobi_ode_residual(n: int, jp: JacobiParams, z: ArrayLike) -> NDArray[np.float64] | float:
    """|(1-z^2) y'' + (b - a - (a+b+2) z) y' + n(n+a+b+1) y| divided by the largest term."""
    z_arr = np.asarray(z, dtype=complex)
    y = np.asarray(jacobi_eval(n, jp, z_arr))
    dy = np.asarray(jacobi_deriv(n, jp, z_arr))
    d2y = np.asarray(jacobi_deriv2(n, jp, z_arr))
    a, b = jp.a, jp.b
    terms = (
        (1 - z_arr**2) * d2y,
        (b - a - (a + b + 2) * z_arr) * dy,
        n * (n + a + b + 1) * y,
    )
    total = terms[0] + terms[1] + terms[2]
    scale = np.maximum.reduce([np.abs(t) for t in terms])
    out = np.where(scale > 0, np.abs(total) / np.where(scale > 0, scale, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out
