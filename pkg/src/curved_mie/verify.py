"""Self-verification suites.

Each suite returns a list of :class:`Check` rows.  Mandatory rows decide the
exit status of ``curved-mie verify``; informational rows carry measurements
that are worth reporting but have no pass/fail meaning.
"""

from __future__ import annotations

import math
import time
import warnings
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import eval_jacobi, eval_legendre

from curved_mie import algebra as alg
from curved_mie.config import RunConfig
from curved_mie.model import (
    PhysicalParams,
    SpherePoint,
    embed,
    psi_of_r,
    r_of_psi,
    v_curved,
    v_flat,
)
from curved_mie.oracle import assemble_curved, curved_spectrum, eigenpairs, flat_spectrum
from curved_mie.specfun import JacobiParams, jacobi_eval, jacobi_ode_residual
from curved_mie.spectrum import (
    VALIDATED_MODE,
    SolvabilityMode,
    enumerate_levels,
    flat_limit_energy,
    level,
    quantization_residual,
)
from curved_mie.wavefunction import (
    Grid,
    boundary_decay_exponent,
    equation_residual,
    eval_eigenfunction,
    normalize,
    overlap,
)

SUITES = ("geometry", "specfun", "spectrum", "wavefunction", "algebra", "limits")

# Mode arbitration grid: V0 x a x R x m with hbar = mu = 1.
ARBITRATION_GRID = tuple(
    (V0, a, R, m)
    for V0 in (0.5, 1.0, 2.0)
    for a in (0.5, 1.0)
    for R in (1.0, 2.0)
    for m in (0, 1)
)
LIMIT_RADII = (10.0, 20.0, 40.0, 80.0)


@dataclass(frozen=True)
class Check:
    suite: str
    check: str
    status: str  # "pass" | "fail" | "info"
    measured: Any
    tolerance: Any = None
    mandatory: bool = True

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "check": self.check,
            "status": self.status,
            "measured": self.measured,
            "tolerance": self.tolerance,
        }


@dataclass
class _Recorder:
    suite: str
    verify_tol: float | None = None
    rows: list[Check] = field(default_factory=list)

    def upper(self, name: str, value: float, tol: float) -> bool:
        """value <= tol; the config's verify_tol, when set, replaces tol."""
        tol = self.verify_tol if self.verify_tol is not None else tol
        ok = bool(np.isfinite(value) and value <= tol)
        self.rows.append(Check(self.suite, name, "pass" if ok else "fail", float(value), tol))
        return ok

    def within(self, name: str, value: float, lo: float, hi: float) -> bool:
        ok = bool(lo <= value <= hi)
        self.rows.append(Check(self.suite, name, "pass" if ok else "fail", float(value), [lo, hi]))
        return ok

    def equal(self, name: str, value: Any, expected: Any) -> bool:
        ok = value == expected
        self.rows.append(Check(self.suite, name, "pass" if ok else "fail", value, expected))
        return ok

    def order(self, name: str, ns: Iterable[int], errors: list[float], lo: float) -> None:
        """Convergence-order check; errors already at round-off have no order to fit."""
        if max(errors) < 1e-13:
            self.info(name, "exact to round-off on every grid")
        else:
            self.within(name, observed_order(ns, errors), lo, math.inf)

    def info(self, name: str, value: Any) -> None:
        self.rows.append(Check(self.suite, name, "info", value, None, mandatory=False))


def observed_order(ns: Iterable[int], errors: Iterable[float]) -> float:
    """Least-squares convergence order from errors on grids of size ns."""
    ns = np.asarray(list(ns), dtype=float)
    errors = np.asarray(list(errors), dtype=float)
    slope, _ = np.polyfit(np.log(ns), np.log(errors), 1)
    return float(-slope)


def local_minima(values: np.ndarray) -> int:
    """Sign changes of the discrete derivative from - to +."""
    d = np.sign(np.diff(values))
    d = d[d != 0]
    return int(np.sum((d[:-1] < 0) & (d[1:] > 0)))


def derivative_sign_changes(values: np.ndarray) -> int:
    d = np.sign(np.diff(values))
    d = d[d != 0]
    return int(np.sum(d[:-1] != d[1:]))


# --------------------------------------------------------------------------- geometry


def geometry_suite(cfg: RunConfig) -> list[Check]:
    rec = _Recorder("geometry", cfg.verify_tol)
    p = cfg.params
    rng = np.random.default_rng(2024)
    worst = 0.0
    for psi, th, ph in zip(
        rng.uniform(0, math.pi, 10_000), rng.uniform(0, math.pi, 10_000), rng.uniform(0, 2 * math.pi, 10_000)
    ):
        z = embed(SpherePoint(float(psi), float(th), float(ph)), p.R)
        worst = max(worst, abs(z.norm2 - p.R**2) / p.R**2)
    rec.upper("embedding_norm", worst, 1e-12)

    psi = np.linspace(1e-3, 0.5 * math.pi - 1e-3, 1000)
    rec.upper("chart_roundtrip", float(np.max(np.abs(psi_of_r(r_of_psi(psi, p.R), p.R) - psi))), 1e-12)

    r = np.linspace(0.05, 20.0, 2000) * p.a
    vf = v_flat(r, p)
    vc = v_curved(psi_of_r(r, p.R), p)
    scale = max(float(np.max(np.abs(vf))), 1e-300)
    rec.upper("chart_pullback_equals_flat", float(np.max(np.abs(vc - vf))) / scale, 1e-12)

    if p.V0 > 0:
        rr = np.linspace(0.01, 10.0, 100_001) * p.a
        vv = v_flat(rr, p)
        i = int(np.argmin(vv))
        rec.upper("flat_minimum_location", abs(rr[i] - p.a) / p.a, 1e-4)
        rec.upper("flat_minimum_depth", abs(vv[i] + 0.5 * p.V0) / p.V0, 1e-8)
        grid = np.linspace(0, math.pi, 10_002)[1:-1]
        rec.equal("curved_minima_on_half_period", local_minima(v_curved(grid, p)), 1)
        full = np.linspace(0, 2 * math.pi, 20_003)[1:-1]
        full = full[np.abs(full - math.pi) > 1e-9]
        rec.equal(
            "curved_minima_on_full_period",
            local_minima(v_curved(np.mod(full, math.pi), p)),
            2,
        )
    rec.upper("curved_zero_at_equator", abs(float(v_curved(0.5 * math.pi, p))), 1e-12 * max(abs(p.V0), 1.0))
    return rec.rows


# --------------------------------------------------------------------------- specfun


def specfun_suite(cfg: RunConfig) -> list[Check]:
    rec = _Recorder("specfun", cfg.verify_tol)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(0, 13))
        jp = JacobiParams(
            complex(rng.uniform(-0.9, 3.0), rng.uniform(-3.0, 3.0)),
            complex(rng.uniform(-0.9, 3.0), rng.uniform(-3.0, 3.0)),
        )
        z = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        worst = max(worst, float(jacobi_ode_residual(n, jp, z)))
    rec.upper("ode_residual_random_complex", worst, 1e-9)

    x = np.linspace(-0.95, 0.95, 20)
    leg = max(
        float(np.max(np.abs(jacobi_eval(n, JacobiParams(0, 0), x) - eval_legendre(n, x))))
        for n in range(13)
    )
    rec.upper("legendre_special_case", leg, 1e-12)

    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(0, 13))
        a, b = rng.uniform(-0.9, 3.0, 2)
        ref = eval_jacobi(n, a, b, x)
        worst = max(worst, float(np.max(np.abs(jacobi_eval(n, JacobiParams(a, b), x) - ref)) / max(1.0, np.max(np.abs(ref)))))
    rec.upper("real_parameters_vs_scipy", worst, 1e-12)
    return rec.rows


# --------------------------------------------------------------------------- spectrum


def _rel_err(E: float, E_ref: float, p: PhysicalParams) -> float:
    return abs(E - E_ref) / max(abs(E_ref), p.energy_scale)


def arbitration(N: int = 8192, k: int = 4) -> dict:
    """Max relative error of each mode's lowest-k energies against the oracle over the grid."""
    worst = {mode: 0.0 for mode in SolvabilityMode}
    for V0, a, R, m in ARBITRATION_GRID:
        p = PhysicalParams(a=a, R=R, V0=V0)
        oracle = curved_spectrum(p, m, k, N).eigenvalues
        for mode in SolvabilityMode:
            analytic = [lv.energy for lv in enumerate_levels(k, m, p, mode)]
            err = max(_rel_err(e, o, p) for e, o in zip(analytic, oracle))
            worst[mode] = max(worst[mode], err)
    return {mode.value: worst[mode] for mode in SolvabilityMode}


def spectrum_suite(cfg: RunConfig) -> list[Check]:
    rec = _Recorder("spectrum", cfg.verify_tol)
    free = PhysicalParams(V0=0.0)
    t0 = time.perf_counter()
    vals = curved_spectrum(free, 0, 5, 8192).eigenvalues
    elapsed = time.perf_counter() - t0
    exact = np.array([L * (L + 2) / 2.0 for L in range(5)])
    rec.upper("free_particle_exactness", float(np.max(np.abs(vals - exact))), 1e-6)
    rec.upper("free_particle_runtime_s", elapsed, 10.0)
    for mode in SolvabilityMode:
        e1 = enumerate_levels(1, 0, free, mode)[0].energy
        rec.info(f"free_particle_offset_{mode.value}", e1 - float(vals[0]))

    t0 = time.perf_counter()
    errs = arbitration(cfg.N)
    elapsed = time.perf_counter() - t0
    winners = [m for m, e in errs.items() if e <= 1e-4]
    rec.info("mode_errors", errs)
    rec.rows.append(
        Check("spectrum", "mode_arbitration", "pass" if winners else "fail", {"winners": winners}, 1e-4)
    )
    rec.equal("validated_mode", VALIDATED_MODE.value, winners[0] if winners else None)
    rec.upper("arbitration_runtime_s", elapsed, 300.0)

    p = cfg.params
    worst_q, monotone = 0.0, True
    for m in (0, 1, 2):
        levels = [level(n, m, p) for n in range(1, 7)]
        worst_q = max(worst_q, *(quantization_residual(lv.n, lv.beta_n, lv.j) for lv in levels))
        monotone &= all(a.energy < b.energy for a, b in zip(levels, levels[1:]))
    rec.upper("quantization_condition", worst_q, 1e-12)
    rec.equal("energies_increase_with_n", monotone, True)
    return rec.rows


# --------------------------------------------------------------------------- wavefunction


def wavefunction_suite(cfg: RunConfig) -> list[Check]:
    rec = _Recorder("wavefunction", cfg.verify_tol)
    p, m = cfg.params, 0
    ns = (2048, 4096, 8192, 16384)
    margin = 5.0 * math.pi / ns[0]
    grid = Grid(8192)
    samples = []
    for n in (1, 2, 3):
        lv = level(n, m, p)
        errs = [
            equation_residual(normalize(eval_eigenfunction(lv, Grid(N))), lv.energy, p, m, margin=margin)
            for N in ns
        ]
        rec.upper(f"equation_residual_n{n}", errs[2], 1e-3)
        rec.order(f"equation_residual_order_n{n}", ns, errs, 1.8)
        w = normalize(eval_eigenfunction(lv, grid))
        samples.append(w)
        slope = boundary_decay_exponent(w)
        rec.upper(f"pole_exponent_vs_j_n{n}", abs(slope - lv.j), 0.1)
        rec.info(f"pole_exponent_minus_prefactor_power_n{n}", slope - (lv.nj - 1.0))
        rec.upper(
            f"real_jacobi_equation_n{n}",
            float(np.max(jacobi_ode_residual(lv.degree, lv.jacobi, np.linspace(-0.99, 0.99, 50)))),
            1e-9,
        )
        literal = normalize(eval_eigenfunction(lv, Grid(8192), exponent="literal"))
        rec.info(f"literal_exponent_residual_n{n}", equation_residual(literal, lv.energy, p, m))

    lv4 = level(4, m, p)
    samples.append(normalize(eval_eigenfunction(lv4, grid)))
    rec.upper("unit_norm", max(abs(w.norm - 1.0) for w in samples), 1e-6)
    rec.upper(
        "orthogonality",
        max(abs(overlap(a, b)) for i, a in enumerate(samples) for b in samples[i + 1 :]),
        1e-4,
    )

    ep = eigenpairs(assemble_curved(p, m, grid.n_points), 3)
    sin = np.sin(grid.psi_values)
    worst = 0.0
    for w, vec in zip(samples, ep.eigenvectors):
        phi = w.values.real * sin
        vec = vec * np.sign(np.dot(vec, phi))
        worst = max(worst, float(np.max(np.abs(phi - vec))))
    rec.upper("oracle_eigenvector_phi", worst, 1e-3)
    return rec.rows


# --------------------------------------------------------------------------- algebra


def smooth_test_function(grid: Grid) -> alg.IndexedFunction:
    psi = grid.psi_values
    return alg.IndexedFunction(0.3 + 0.2j, 1.1 - 0.4j, np.sin(psi) ** 6 * np.exp(np.cos(psi)) + 0j, grid)


def usable_branches(A: float) -> tuple[alg.Branch, ...]:
    """Mode 2 degenerates (t = 0) when A = 0, i.e. for the free particle."""
    return tuple(alg.Branch) if A != 0 else (alg.Branch.MODE1,)


def algebra_rows(p: PhysicalParams, n: int = 1, m: int = 0) -> list[dict]:
    """Residual table {identity, grid_N, residual, convergence_order} for one level."""
    lv = level(n, m, p)
    A = lv.constants.A
    ns = (512, 1024, 2048)
    table: dict[str, list[float]] = {}
    for N in ns:
        grid = Grid(N)
        for branch in usable_branches(A):
            phi, fp = alg.eigen_realization(lv, grid, branch, alg.default_signs(lv.nj - 1, A, branch))
            via = "O1" if branch is alg.Branch.MODE1 else "O2"
            table.setdefault(f"factorization_lower_raise_{branch.value}", []).append(
                alg.factorization_residual(phi.values, fp, grid, "lower_raise")
            )
            table.setdefault(f"factorization_raise_lower_{branch.value}", []).append(
                alg.factorization_residual(phi.values, fp, grid, "raise_lower")
            )
            table.setdefault(f"casimir_{via}", []).append(alg.casimir_eigencheck(phi, lv.j, via))
        smooth = smooth_test_function(grid)
        table.setdefault("commutator_O1+_O1-", []).append(alg.commutator_residual(("O1+", "O1-"), smooth))
        table.setdefault("commutator_O2+_O2-", []).append(alg.commutator_residual(("O2+", "O2-"), smooth))
    rows = []
    for name, errs in table.items():
        order = observed_order(ns, errs)
        for N, e in zip(ns, errs):
            rows.append({"identity": name, "grid_N": N, "residual": e, "convergence_order": order})
    return rows


def algebra_suite(cfg: RunConfig) -> list[Check]:
    rec = _Recorder("algebra", cfg.verify_tol)
    p, m = cfg.params, 0
    coarse = (512, 1024, 2048)
    big = Grid(8192)

    for n in (1, 2, 3):
        lv = level(n, m, p)
        A = lv.constants.A
        rec.upper(f"top_rung_energy_n{n}", alg.check_top_rung(lv), 1e-10 * max(1.0, abs(alg.reduced_energy(lv))))
        if A == 0:
            rec.info(f"mode2_skipped_n{n}", "A = 0: t vanishes, only mode1 factorizes")
        for branch in usable_branches(A):
            signs = alg.default_signs(lv.nj - 1, A, branch)
            phi, fp = alg.eigen_realization(lv, big, branch, signs)
            tag = f"{branch.value}_n{n}"
            for which in ("raise_lower", "lower_raise"):
                rec.upper(f"factorization_{which}_{tag}", alg.factorization_residual(phi.values, fp, big, which), 1e-5)
                errs = []
                for N in coarse:
                    ph, f2 = alg.eigen_realization(lv, Grid(N), branch, signs)
                    errs.append(alg.factorization_residual(ph.values, f2, Grid(N), which))
                rec.order(f"factorization_{which}_order_{tag}", coarse, errs, 2.0)
            mr = alg.matching_residuals(fp)
            rec.upper(f"matching_cross_term_{tag}", mr["cross_term"], 1e-12)
            rec.upper(f"epsilon_consistency_{tag}", mr["epsilon_consistency"], 1e-12)
            rec.info(f"matching_squared_reading_{tag}", mr["squared"])
            rec.info(f"matching_unsquared_reading_{tag}", mr["unsquared"])

        phi1, _ = alg.eigen_realization(lv, big, alg.Branch.MODE1, alg.default_signs(lv.nj - 1, A, alg.Branch.MODE1))
        rec.upper(f"casimir_O1_n{n}", alg.casimir_eigencheck(phi1, lv.j, "O1"), 1e-4)
        if A != 0:
            phi2, _ = alg.eigen_realization(lv, big, alg.Branch.MODE2, alg.default_signs(lv.nj - 1, A, alg.Branch.MODE2))
            rec.upper(f"casimir_O2_n{n}", alg.casimir_eigencheck(phi2, lv.j, "O2"), 1e-4)
            c1 = alg.casimir_apply(phi1, "O1").values
            c2 = alg.casimir_apply(phi2, "O2").values
            rec.upper(f"casimir_forms_agree_n{n}", float(np.linalg.norm(c1 - c2) / np.linalg.norm(c1)), 1e-4)
        errs = [
            alg.casimir_eigencheck(alg.eigen_realization(lv, Grid(N))[0], lv.j, "O1") for N in coarse
        ]
        rec.order(f"casimir_order_n{n}", coarse, errs, 2.0)

    smooth = smooth_test_function(big)
    worst = max(
        alg.commutator_residual((x, o), smooth)
        for x in ("X1", "X2")
        for o in ("O1+", "O1-", "O2+", "O2-")
    )
    rec.upper("index_commutators_exact", worst, 1e-13)
    for k in (1, 2):
        pair = (f"O{k}+", f"O{k}-")
        rec.upper(f"commutator_O{k}+_O{k}-", alg.commutator_residual(pair, smooth_test_function(Grid(1024))), 1e-6)
        ns = (256, 512, 1024, 2048)
        errs = [alg.commutator_residual(pair, smooth_test_function(Grid(N))) for N in ns]
        rec.order(f"commutator_O{k}+_O{k}-_order", ns, errs, 3.7)
    return rec.rows


# --------------------------------------------------------------------------- limits


def flat_limit_gaps(p: PhysicalParams | None = None, radii: Iterable[float] = LIMIT_RADII) -> tuple[float, list[float]]:
    """Flat oracle ground energy and |E_1(R) - E_flat| for each radius."""
    p = p or PhysicalParams()
    e_flat = float(flat_spectrum(p, 0, 1).eigenvalues[0])
    gaps = [
        abs(level(1, 0, PhysicalParams(hbar=p.hbar, mu=p.mu, R=R, a=p.a, V0=p.V0)).energy - e_flat)
        for R in radii
    ]
    return e_flat, gaps


def limits_suite(cfg: RunConfig) -> list[Check]:
    rec = _Recorder("limits", cfg.verify_tol)
    p = PhysicalParams()
    e_flat, gaps = flat_limit_gaps(p)
    slope, _ = np.polyfit(np.log(LIMIT_RADII), np.log(gaps), 1)
    rec.info("flat_gaps", dict(zip([str(r) for r in LIMIT_RADII], gaps)))
    rec.within("flat_gap_loglog_slope", float(slope), -2.5, -1.5)
    lim = flat_limit_energy(1, level(1, 0, p).j, p)
    rec.info("flat_oracle_E1", e_flat)
    rec.info("literal_flat_formula_E1", lim.literal)
    rec.info("literal_flat_formula_discrepancy", lim.literal - e_flat)
    rec.info("curvature_limit_E1", lim.curvature_limit)
    rec.info("curvature_limit_discrepancy", lim.curvature_limit - e_flat)
    return rec.rows


_SUITE_FUNCS: dict[str, Callable[[RunConfig], list[Check]]] = {
    "geometry": geometry_suite,
    "specfun": specfun_suite,
    "spectrum": spectrum_suite,
    "wavefunction": wavefunction_suite,
    "algebra": algebra_suite,
    "limits": limits_suite,
}


def run_suites(
    cfg: RunConfig, suites: Iterable[str] = SUITES, threads: int = 1
) -> list[Check]:
    suites = list(suites)
    for s in suites:
        if s not in _SUITE_FUNCS:
            raise ValueError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    with warnings.catch_warnings():
        # n + j <= 1 levels warn on evaluation; the suites measure that directly
        warnings.simplefilter("ignore", RuntimeWarning)
        if threads <= 1:
            results = [_SUITE_FUNCS[s](cfg) for s in suites]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda s: _SUITE_FUNCS[s](cfg), suites))
    return [row for rows in results for row in rows]


def all_passed(rows: Iterable[Check]) -> bool:
    return all(r.status == "pass" for r in rows if r.mandatory)
