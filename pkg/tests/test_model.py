import math

import numpy as np
import pytest

from curved_mie.model import (
    DomainError,
    PhysicalParams,
    SpherePoint,
    c1_of_energy,
    derive_constants,
    embed,
    energy_of_c1,
    psi_of_r,
    r_of_psi,
    v_curved,
    v_flat,
)

UNIT = PhysicalParams()


class TestPhysicalParams:
    def test_defaults_are_dimensionless_units(self):
        assert (UNIT.hbar, UNIT.mu, UNIT.R, UNIT.a, UNIT.V0) == (1, 1, 1, 1, 1)
        assert UNIT.coupling == 1.0
        assert UNIT.energy_scale == 0.5

    @pytest.mark.parametrize("field", ["hbar", "mu", "R", "a"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(DomainError, match=field):
            PhysicalParams(**{field: 0.0})

    def test_rejects_nonfinite_depth(self):
        with pytest.raises(DomainError):
            PhysicalParams(V0=math.inf)

    def test_epsilon_k_form(self):
        assert PhysicalParams.from_depth(0.25, k=1).V0 == 0.5

    def test_free_flag(self):
        assert PhysicalParams(V0=0).is_free
        assert not UNIT.is_free


class TestPotentials:
    def test_flat_at_a_is_minus_half_depth(self):
        p = PhysicalParams(a=2.5, V0=3.0)
        assert v_flat(2.5, p) == pytest.approx(-1.5, abs=1e-15)

    def test_flat_at_half_a_is_zero(self):
        assert v_flat(0.5, UNIT) == 0.0

    def test_flat_tends_to_zero_from_below(self):
        vals = v_flat(np.array([1e3, 1e5, 1e7]), UNIT)
        assert np.all(vals < 0)
        assert abs(vals[-1]) < 1e-6

    def test_flat_rejects_nonpositive_r(self):
        with pytest.raises(DomainError):
            v_flat(0.0, UNIT)

    def test_flat_minimum_by_sign_change(self):
        r = np.linspace(0.5, 2.0, 3001)
        d = np.diff(v_flat(r, UNIT))
        i = np.flatnonzero((d[:-1] < 0) & (d[1:] >= 0))
        assert i.size == 1
        assert r[i[0] + 1] == pytest.approx(1.0, abs=1e-3)

    def test_curved_equator_zero(self):
        assert abs(v_curved(math.pi / 2, UNIT)) < 1e-15

    def test_curved_quarter(self):
        assert v_curved(math.pi / 4, UNIT) == pytest.approx(-0.5, abs=1e-15)

    @pytest.mark.parametrize("psi", [0.0, math.pi])
    def test_curved_singular_points(self, psi):
        with pytest.raises(DomainError, match="singular"):
            v_curved(psi, UNIT)

    def test_chart_consistency(self):
        p = PhysicalParams(R=3.0, a=0.7, V0=2.0)
        psi = np.linspace(1e-3, math.pi / 2 - 1e-3, 500)
        lhs = v_curved(psi, p)
        rhs = v_flat(r_of_psi(psi, p.R), p)
        assert np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))) < 1e-13

    @pytest.mark.parametrize("R", [10.0, 100.0, 1000.0])
    def test_flat_recovery_is_exact_under_chart(self, R):
        # cot(arctan(r/R)) = R/r exactly, so the pullback agrees at every R.
        p = PhysicalParams(R=R)
        r = np.linspace(0.2, 5.0, 200)
        assert np.max(np.abs(v_curved(psi_of_r(r, R), p) - v_flat(r, p))) < 1e-12

    def test_curved_single_well_on_half_period(self):
        psi = np.linspace(0, math.pi, 10_002)[1:-1]
        d = np.sign(np.diff(v_curved(psi, UNIT)))
        assert np.sum(d[:-1] != d[1:]) == 1

    def test_curved_two_wells_on_full_period(self):
        psi = np.linspace(0, 2 * math.pi, 20_003)[1:-1]
        psi = psi[np.abs(psi - math.pi) > 1e-9]
        v = v_curved(np.mod(psi, math.pi), UNIT)
        d = np.sign(np.diff(v))
        assert np.sum((d[:-1] < 0) & (d[1:] > 0)) == 2


class TestCharts:
    def test_psi_of_r_examples(self):
        assert psi_of_r(0.0, 2.0) == 0.0
        assert psi_of_r(2.0, 2.0) == pytest.approx(math.pi / 4, abs=1e-15)

    def test_round_trip(self):
        x = np.linspace(0, 50, 101)
        assert np.allclose(r_of_psi(psi_of_r(x, 3.0), 3.0), x, rtol=1e-13, atol=1e-13)

    def test_r_of_psi_range(self):
        with pytest.raises(DomainError):
            r_of_psi(math.pi / 2, 1.0)


class TestEmbedding:
    def test_examples(self):
        assert embed(SpherePoint(math.pi / 2, math.pi / 2, 0.0), 2.0).zeta == pytest.approx((2.0, 0.0, 0.0, 0.0), abs=1e-15)
        assert embed(SpherePoint(0.0, 1.0, 2.0), 2.0).zeta == pytest.approx((0.0, 0.0, 0.0, 2.0))

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            SpherePoint(-0.1, 0.0, 0.0)


class TestConstants:
    def test_unit_example(self):
        c = derive_constants(UNIT, 0)
        assert (c.C2, c.C3, c.A) == (1.0, 2.0, -1.0)

    def test_second_example(self):
        c = derive_constants(PhysicalParams(R=2.0), 1)
        assert (c.C2, c.C3, c.A) == (3.0, 4.0, -2.0)

    def test_rejects_bad_m(self):
        with pytest.raises(DomainError):
            derive_constants(UNIT, -1)
        with pytest.raises(DomainError):
            derive_constants(UNIT, 1.5)

    def test_c1_examples(self):
        assert c1_of_energy(-0.5, UNIT) == 0.0
        assert c1_of_energy(0.0, UNIT) == 1.0

    def test_c1_round_trip(self):
        p = PhysicalParams(R=1.7, a=0.3, V0=4.0, mu=2.0)
        for E in (-3.0, 0.0, 0.25, 12.0):
            assert energy_of_c1(c1_of_energy(E, p), p) == pytest.approx(E, abs=1e-14)
