import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from curved_mie.model import PhysicalParams
from curved_mie.oracle import assemble_curved, eigenpairs
from curved_mie.specfun import jacobi_eval, jacobi_ode_residual
from curved_mie.spectrum import SolvabilityMode, level
from curved_mie.wavefunction import (
    F_to_f,
    F_to_phi,
    Grid,
    WaveSample,
    ZeroNormError,
    boundary_decay_exponent,
    equation_residual,
    eval_eigenfunction,
    f_to_F,
    normalize,
    overlap,
    phi_to_F,
    phi_to_psi,
    psi_to_phi,
)

UNIT = PhysicalParams()
FREE = PhysicalParams(V0=0.0)


def mp_psi(lv, x):
    """Closed form exp(-alpha x/2) sin^(n+j-1) x P_{n-1}(-i cot x), straight from the formula."""
    a, b = mpmath.mpc(lv.jacobi.a), mpmath.mpc(lv.jacobi.b)
    z = -1j * mpmath.cot(x)
    k = lv.degree
    poly = mpmath.fsum(
        mpmath.binomial(k + a, k - s) * mpmath.binomial(k + b, s) * ((z - 1) / 2) ** s * ((z + 1) / 2) ** (k - s)
        for s in range(k + 1)
    )
    return mpmath.exp(-lv.alpha_n * x / 2) * mpmath.sin(x) ** (lv.nj - 1) * poly


class TestGrid:
    def test_open_uniform(self):
        g = Grid(16)
        x = g.psi_values
        assert x.size == 15
        assert x[0] == pytest.approx(math.pi / 16) and x[-1] == pytest.approx(15 * math.pi / 16)
        assert np.allclose(np.diff(x), math.pi / 16)

    @pytest.mark.parametrize("N", [3, 2, 9])
    def test_rejects(self, N):
        with pytest.raises(ValueError):
            Grid(N)


class TestEvaluation:
    def test_matches_mpmath_closed_form(self):
        g = Grid(64)
        for n in (1, 2, 4):
            lv = level(n, 1, UNIT)
            w = eval_eigenfunction(lv, g)
            ref = np.array([complex(mp_psi(lv, x)) for x in g.psi_values])
            assert np.max(np.abs(w.values - ref)) < 1e-10 * np.max(np.abs(ref))

    def test_equator_value(self):
        g = Grid(64)
        lv = level(1, 0, UNIT)
        v = eval_eigenfunction(lv, g).values[31]
        assert np.isfinite(v) and abs(v) > 0
        assert v == pytest.approx(math.exp(-lv.alpha_n * math.pi / 4))

    def test_warns_when_not_vanishing(self):
        with pytest.warns(RuntimeWarning, match="do"):
            eval_eigenfunction(level(1, 0, FREE), Grid(64))

    def test_no_warning_for_bound_states(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            eval_eigenfunction(level(2, 0, UNIT), Grid(64))

    def test_large_nj_does_not_overflow(self):
        lv = level(3, 0, PhysicalParams(V0=2000.0))
        w = normalize(eval_eigenfunction(lv, Grid(4096)))
        assert np.all(np.isfinite(w.values))
        assert abs(w.norm - 1) < 1e-8

    def test_unknown_exponent(self):
        with pytest.raises(ValueError):
            eval_eigenfunction(level(1, 0, UNIT), Grid(64), exponent="other")

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_vanishes_at_ends(self, n):
        g = Grid(8192)
        lv = level(n, 0, UNIT)
        w = eval_eigenfunction(lv, g)
        bound = 10 * g.h ** min(lv.j, 2) * np.max(np.abs(w.values))
        assert abs(w.values[0]) < bound and abs(w.values[-1]) < bound


class TestNormalization:
    def test_against_adaptive_quadrature(self):
        lv = level(2, 0, UNIT)
        norm_ref, _ = quad(lambda x: abs(complex(mp_psi(lv, x))) ** 2 * math.sin(x) ** 2, 0, math.pi, limit=200)
        w = eval_eigenfunction(lv, Grid(4096))
        assert w.norm == pytest.approx(norm_ref, rel=1e-8)

    def test_idempotent(self):
        w = normalize(eval_eigenfunction(level(2, 1, UNIT), Grid(1024)))
        w2 = normalize(w)
        assert np.max(np.abs(w2.values - w.values)) < 1e-12

    def test_scale_and_phase_invariant(self):
        w = eval_eigenfunction(level(3, 0, UNIT), Grid(1024))
        scaled = WaveSample(w.grid, 3j * w.values, 9 * w.norm)
        assert np.max(np.abs(normalize(scaled).values - normalize(w).values)) < 1e-12

    def test_zero(self):
        with pytest.raises(ZeroNormError):
            normalize(WaveSample(Grid(8), np.zeros(7, complex), 0.0))

    def test_free_ground_state(self):
        with pytest.warns(RuntimeWarning):
            w = normalize(eval_eigenfunction(level(1, 0, FREE), Grid(1024)))
        assert abs(w.norm - 1) < 1e-8
        assert np.allclose(w.values, math.sqrt(2 / math.pi))

    def test_orthogonality(self):
        g = Grid(8192)
        ws = [normalize(eval_eigenfunction(level(n, 1, UNIT), g)) for n in range(1, 5)]
        for i in range(4):
            for k in range(i + 1, 4):
                assert abs(overlap(ws[i], ws[k])) < 1e-4


class TestTransforms:
    def test_round_trip(self):
        g = Grid(256)
        x = g.psi_values
        lv = level(3, 0, UNIT)
        psi = eval_eigenfunction(lv, g).values
        F = phi_to_F(psi_to_phi(psi, x), lv.alpha_n, x)
        f = F_to_f(F, lv.beta_n, x)
        back = phi_to_psi(F_to_phi(f_to_F(f, lv.beta_n, x), lv.alpha_n, x), x)
        assert np.max(np.abs(back - psi) / np.max(np.abs(psi))) < 1e-12

    def test_constant(self):
        x = Grid(32).psi_values
        assert np.allclose(psi_to_phi(np.ones_like(x), x), np.sin(x))

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_chain_recovers_jacobi_polynomial(self, n):
        g = Grid(512)
        x = g.psi_values
        lv = level(n, 1, UNIT)
        psi = eval_eigenfunction(lv, g).values
        f = F_to_f(phi_to_F(psi_to_phi(psi, x), lv.alpha_n, x), lv.beta_n, x)
        keep = (x > 0.1) & (x < math.pi - 0.1)
        ref = jacobi_eval(lv.degree, lv.jacobi, -1j / np.tan(x[keep]))
        assert np.max(np.abs(f[keep] - ref) / np.abs(ref)) < 1e-10

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_real_segment_jacobi_equation(self, n):
        lv = level(n, 2, UNIT)
        t = np.linspace(-0.99, 0.99, 41)
        assert np.max(jacobi_ode_residual(lv.degree, lv.jacobi, t)) < 1e-9


class TestResidual:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_analytic_level(self, n):
        lv = level(n, 0, UNIT)
        errs = [
            equation_residual(normalize(eval_eigenfunction(lv, Grid(N))), lv.energy, UNIT, 0, margin=5 * math.pi / 2048)
            for N in (2048, 4096, 8192)
        ]
        assert errs[2] < 1e-3
        assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5

    def test_wrong_energy(self):
        lv = level(2, 0, UNIT)
        w = normalize(eval_eigenfunction(lv, Grid(4096)))
        assert equation_residual(w, lv.energy + 0.5, UNIT, 0, margin=0.1) > 1e-2

    def test_oracle_eigenpair(self):
        # the oracle discretizes phi, this residual discretizes Psi: they agree to O(h^2)
        errs = []
        for N in (2048, 4096, 8192):
            g = Grid(N)
            ep = eigenpairs(assemble_curved(UNIT, 0, N), 1)
            w = WaveSample(g, (ep.eigenvectors[0] / np.sin(g.psi_values)).astype(complex), 1.0)
            errs.append(equation_residual(w, ep.eigenvalues[0], UNIT, 0, margin=5 * math.pi / 2048))
        assert errs[-1] < 1e-3
        assert errs[0] / errs[1] > 3.5 and errs[1] / errs[2] > 3.5

    def test_needs_fine_grid(self):
        with pytest.raises(ValueError):
            equation_residual(eval_eigenfunction(level(2, 0, UNIT), Grid(256)), 0.0, UNIT, 0)

    def test_literal_exponent_is_not_a_solution(self):
        lv = level(2, 0, UNIT)
        w = normalize(eval_eigenfunction(lv, Grid(4096), exponent="literal"))
        assert equation_residual(w, lv.energy, UNIT, 0) > 1e-3


class TestOracleAgreement:
    def test_free_ground_state_direct_mode(self):
        N = 2048
        g = Grid(N)
        with pytest.warns(RuntimeWarning):
            w = normalize(eval_eigenfunction(level(1, 0, FREE), g))
        vec = eigenpairs(assemble_curved(FREE, 0, N), 1).eigenvectors[0]
        assert np.max(np.abs(w.values.real - vec / np.sin(g.psi_values))) < 1e-3

    def test_free_ground_state_rederived_mode_disagrees(self):
        N = 2048
        g = Grid(N)
        w = normalize(eval_eigenfunction(level(1, 0, FREE, SolvabilityMode.REDERIVED), g))
        vec = eigenpairs(assemble_curved(FREE, 0, N), 1).eigenvectors[0]
        assert np.max(np.abs(w.values.real - vec / np.sin(g.psi_values))) > 0.1

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_phi_agreement(self, n):
        N = 8192
        g = Grid(N)
        w = normalize(eval_eigenfunction(level(n, 0, UNIT), g))
        vec = eigenpairs(assemble_curved(UNIT, 0, N), n).eigenvectors[n - 1]
        phi = w.values.real * np.sin(g.psi_values)
        vec = vec * np.sign(vec @ phi)
        assert np.max(np.abs(phi - vec)) < 1e-5

    @pytest.mark.parametrize("n", [1, 2])
    def test_psi_agreement(self, n):
        N = 8192
        g = Grid(N)
        w = normalize(eval_eigenfunction(level(n, 0, UNIT), g))
        vec = eigenpairs(assemble_curved(UNIT, 0, N), n).eigenvectors[n - 1]
        vec = vec * np.sign(vec @ (w.values.real * np.sin(g.psi_values)))
        assert np.max(np.abs(w.values.real - vec / np.sin(g.psi_values))) < 1e-3


class TestBoundaryDecay:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exponent_is_frobenius_root(self, n):
        lv = level(n, 0, UNIT)
        w = eval_eigenfunction(lv, Grid(8192))
        assert abs(boundary_decay_exponent(w) - lv.j) < 0.1

    def test_ground_state_matches_prefactor_power(self):
        lv = level(1, 1, UNIT)
        w = eval_eigenfunction(lv, Grid(8192))
        assert abs(boundary_decay_exponent(w) - (lv.nj - 1)) < 0.1
