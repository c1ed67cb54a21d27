"""``curved-mie`` command-line interface."""

from __future__ import annotations

import argparse
import itertools
import logging
import math
import os
import sys
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from curved_mie import verify
from curved_mie.config import ConfigError, RunConfig, load_config, thread_count
from curved_mie.io import to_csv, to_json
from curved_mie.model import DomainError, PhysicalParams, v_curved, v_flat
from curved_mie.oracle import OracleError, assemble_curved, curved_spectrum, eigenpairs
from curved_mie.specfun import JacobiParameterError
from curved_mie.spectrum import (
    NoBoundChannelError,
    SingularLevelError,
    SolvabilityMode,
    enumerate_levels,
    flat_limit_energy,
    level,
)
from curved_mie.wavefunction import Grid, eval_eigenfunction, normalize

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_MODE_CHOICES = {
    "paper": (SolvabilityMode.PAPER_LITERAL,),
    "rederived": (SolvabilityMode.REDERIVED,),
    "direct": (SolvabilityMode.DIRECT,),
    "both": (SolvabilityMode.PAPER_LITERAL, SolvabilityMode.REDERIVED),
    "all": tuple(SolvabilityMode),
}

SPECTRUM_COLUMNS = ("n", "j", "mode", "E_analytic", "E_oracle", "abs_err", "rel_err")
SWEEP_COLUMNS = (
    "R", "V0", "a", "m", "n", "j", "alpha_n", "beta_n",
    "jacobi_a_re", "jacobi_a_im", "jacobi_b_re", "jacobi_b_im",
    "mode", "E_analytic", "E_oracle", "E_flat_limit", "flat_gap", "error",
)


_NUMERIC_ERRORS = (NoBoundChannelError, SingularLevelError, OracleError, JacobiParameterError, FloatingPointError)


# --------------------------------------------------------------------------- helpers


def _modes(args: argparse.Namespace, cfg: RunConfig) -> tuple[SolvabilityMode, ...]:
    return _MODE_CHOICES[args.mode] if args.mode else (cfg.mode,)


def _grid_points(args: argparse.Namespace, cfg: RunConfig) -> int:
    N = args.grid_points if args.grid_points is not None else cfg.N
    if N < 64 or N % 2:
        raise ConfigError(f"--grid-points must be even and >= 64, got {N}")
    return N


def _format(args: argparse.Namespace, cfg: RunConfig) -> str:
    return args.format or cfg.output_format


def _emit(text: str, args: argparse.Namespace, cfg: RunConfig) -> None:
    path = args.out or cfg.output_path
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _table(columns: Sequence[str], rows: list[dict], args: argparse.Namespace, cfg: RunConfig) -> None:
    if _format(args, cfg) == "json":
        _emit(to_json(rows), args, cfg)
    else:
        _emit(to_csv(columns, rows), args, cfg)


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _params(args: argparse.Namespace, cfg: RunConfig) -> PhysicalParams:
    molecule = getattr(args, "molecule", None)
    return cfg.molecule_params(molecule) if molecule else cfg.params


def _rel(E: float, ref: float, p: PhysicalParams) -> float:
    return abs(E - ref) / max(abs(ref), p.energy_scale)


# --------------------------------------------------------------------------- commands


def spectrum_rows(
    p: PhysicalParams, n_max: int, m: int, modes: Sequence[SolvabilityMode], oracle_N: int | None
) -> list[dict]:
    oracle = curved_spectrum(p, m, n_max, oracle_N).eigenvalues if oracle_N else None
    rows = []
    for mode in sorted(modes, key=list(SolvabilityMode).index):
        levels = sorted(enumerate_levels(n_max, m, p, mode), key=lambda lv: lv.n)
        for lv in levels:
            row = {"n": lv.n, "j": lv.j, "mode": mode.value, "E_analytic": lv.energy}
            if oracle is not None:
                ref = float(oracle[lv.n - 1])
                row.update(E_oracle=ref, abs_err=abs(lv.energy - ref), rel_err=_rel(lv.energy, ref, p))
            rows.append(row)
    return rows


def cmd_spectrum(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.n_max < 1:
        raise ConfigError("--n-max must be >= 1")
    N = _grid_points(args, cfg) if args.with_oracle else None
    rows = spectrum_rows(_params(args, cfg), args.n_max, args.m, _modes(args, cfg), N)
    _table(SPECTRUM_COLUMNS, rows, args, cfg)
    return EXIT_OK


def potential_rows(p: PhysicalParams, space: str, samples: int, r_max: float | None, full_period: bool) -> list[dict]:
    if samples < 4 or samples % 2:
        raise ConfigError(f"--samples must be even and >= 4, got {samples}")
    if space == "flat":
        r_max = r_max if r_max is not None else 10.0 * p.a
        if not r_max > 0:
            raise ConfigError("--r-max must be > 0")
        x = np.arange(1, samples + 1) * (r_max / samples)
        V = v_flat(x, p)
    else:
        span = 2.0 * math.pi if full_period else math.pi
        x = np.arange(1, samples) * (span / samples)
        x = x[np.abs(x - math.pi) > 1e-12]
        V = v_curved(np.mod(x, math.pi), p)
    return [{"x": float(a), "V": float(b)} for a, b in zip(x, V)]


def cmd_potential(args: argparse.Namespace, cfg: RunConfig) -> int:
    rows = potential_rows(_params(args, cfg), args.space, args.samples, args.r_max, args.full_period)
    _table(("x", "V"), rows, args, cfg)
    return EXIT_OK


def wavefunction_rows(p: PhysicalParams, n: int, m: int, mode: SolvabilityMode, N: int, with_oracle: bool) -> list[dict]:
    lv = level(n, m, p, mode)
    grid = Grid(N)
    w = normalize(eval_eigenfunction(lv, grid))
    psi = grid.psi_values
    if with_oracle:
        vec = eigenpairs(assemble_curved(p, m, N), n).eigenvectors[n - 1]
        phi = w.values.real * np.sin(psi)
        oracle = vec * np.sign(np.dot(vec, phi)) / np.sin(psi)
    rows = []
    for i, x in enumerate(psi):
        v = w.values[i]
        row = {"psi": float(x), "re": float(v.real), "im": float(v.imag), "abs2": float(abs(v) ** 2)}
        if with_oracle:
            row["oracle"] = float(oracle[i])
        rows.append(row)
    return rows


def cmd_wavefunction(args: argparse.Namespace, cfg: RunConfig) -> int:
    modes = _modes(args, cfg)
    if len(modes) != 1:
        raise ConfigError("wavefunction takes a single --mode")
    with_oracle = args.oracle or args.with_oracle
    rows = wavefunction_rows(_params(args, cfg), args.n, args.m, modes[0], _grid_points(args, cfg), with_oracle)
    cols = ("psi", "re", "im", "abs2") + (("oracle",) if with_oracle else ())
    _table(cols, rows, args, cfg)
    return EXIT_OK


def _parallel_map(func, items, serial: bool):
    if serial:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        return list(pool.map(func, items))


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    suites = [s.strip() for s in args.suites.split(",") if s.strip()] if args.suites else list(verify.SUITES)
    for s in suites:
        if s not in verify.SUITES:
            raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(verify.SUITES)}")
    threads = 1 if args.serial else thread_count()
    rows = verify.run_suites(cfg, suites, threads)
    by_name = {(r.suite, r.check): r for r in rows}
    if ("spectrum", "mode_errors") in by_name:
        errs = by_name[("spectrum", "mode_errors")].measured
        winners = by_name[("spectrum", "mode_arbitration")].measured["winners"]
        print("=" * 64, file=sys.stderr)
        print(f"MODE ARBITRATION: validated mode = {', '.join(winners) or 'NONE'}", file=sys.stderr)
        for mode, e in errs.items():
            print(f"  {mode:>14s}: max relative error vs oracle = {e:.3e}", file=sys.stderr)
        print("=" * 64, file=sys.stderr)
    failed = [r for r in rows if r.mandatory and r.status != "pass"]
    for r in failed:
        print(f"FAIL {r.suite}/{r.check}: measured {r.measured!r}, tolerance {r.tolerance!r}", file=sys.stderr)
    _emit(to_json([r.as_dict() for r in rows]), args, cfg)
    return EXIT_OK if not failed else EXIT_VERIFY


def _sweep_point(point, n_max: int, modes, oracle_N: int | None, hbar: float, mu: float) -> list[dict]:
    R, V0, a, m = point
    base = {"R": R, "V0": V0, "a": a, "m": m}
    try:
        p = PhysicalParams(hbar=hbar, mu=mu, R=R, a=a, V0=V0)
        spec = spectrum_rows(p, n_max, m, modes, oracle_N)
    except (DomainError, *_NUMERIC_ERRORS) as exc:
        return [dict(base, error=f"{type(exc).__name__}: {exc}")]
    out = []
    for row in spec:
        lv = level(row["n"], m, p, SolvabilityMode(row["mode"]))
        nj = lv.nj
        flat = flat_limit_energy(lv.n, lv.j, p).curvature_limit if nj > 0 else None
        out.append(
            dict(
                base,
                n=lv.n, j=lv.j, alpha_n=lv.alpha_n, beta_n=lv.beta_n,
                jacobi_a_re=lv.jacobi.a.real, jacobi_a_im=lv.jacobi.a.imag,
                jacobi_b_re=lv.jacobi.b.real, jacobi_b_im=lv.jacobi.b.imag,
                mode=row["mode"], E_analytic=lv.energy, E_oracle=row.get("E_oracle"),
                E_flat_limit=flat, flat_gap=None if flat is None else abs(lv.energy - flat),
            )
        )
    return out


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    p = cfg.params
    Rs = sorted(set(args.R or [p.R]))
    V0s = sorted(set(args.V0 or [p.V0]))
    As = sorted(set(args.a or [p.a]))
    Ms = sorted(set(args.m or [0]))
    if any(m < 0 for m in Ms):
        raise ConfigError("--m values must be >= 0")
    if args.n_max < 1:
        raise ConfigError("--n-max must be >= 1")
    points = list(itertools.product(Rs, V0s, As, Ms))
    N = _grid_points(args, cfg) if args.with_oracle else None
    modes = _modes(args, cfg)
    results = _parallel_map(
        lambda pt: _sweep_point(pt, args.n_max, modes, N, p.hbar, p.mu), points, args.serial
    )
    rows = [r for chunk in results for r in chunk]
    _table(SWEEP_COLUMNS, rows, args, cfg)
    return EXIT_OK


def cmd_algebra(args: argparse.Namespace, cfg: RunConfig) -> int:
    rows = verify.algebra_rows(_params(args, cfg), args.n, args.m)
    _table(("identity", "grid_N", "residual", "convergence_order"), rows, args, cfg)
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--mode", choices=sorted(_MODE_CHOICES), help="closed-form constants to use (default: config, else the validated mode)")
    common.add_argument("--with-oracle", action="store_true", help="also solve the finite-difference problem")
    common.add_argument("--grid-points", type=int, help="oracle / sampling grid size N (even)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--serial", action="store_true", help="disable the thread pool")

    parser = argparse.ArgumentParser(prog="curved-mie", description="Mie (Kratzer) potential on the 3-sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="closed-form energies, optionally against the oracle")
    sp.add_argument("--n-max", type=int, default=4)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--molecule")
    sp.set_defaults(func=cmd_spectrum)

    pp = sub.add_parser("potential", parents=[common], help="potential curve V(r) or V(psi)")
    pp.add_argument("--space", choices=("flat", "curved"), default="curved")
    pp.add_argument("--molecule")
    pp.add_argument("--samples", type=int, default=1000)
    pp.add_argument("--r-max", type=float)
    pp.add_argument("--full-period", action="store_true", help="curved: sample psi over (0, 2 pi)")
    pp.set_defaults(func=cmd_potential)

    wp = sub.add_parser("wavefunction", parents=[common], help="normalized eigenfunction samples")
    wp.add_argument("--n", type=int, default=1)
    wp.add_argument("--m", type=int, default=0)
    wp.add_argument("--molecule")
    wp.add_argument("--oracle", action="store_true", help="add the finite-difference eigenvector column")
    wp.set_defaults(func=cmd_wavefunction)

    vp = sub.add_parser("verify", parents=[common], help="run the verification suites")
    vp.add_argument("--suites", help=f"comma-separated subset of {','.join(verify.SUITES)}")
    vp.set_defaults(func=cmd_verify)

    swp = sub.add_parser("sweep", parents=[common], help="spectrum over a parameter grid")
    swp.add_argument("--R", type=_floats)
    swp.add_argument("--V0", type=_floats)
    swp.add_argument("--a", type=_floats)
    swp.add_argument("--m", type=_ints)
    swp.add_argument("--n-max", type=int, default=2)
    swp.set_defaults(func=cmd_sweep)

    ap = sub.add_parser("algebra", parents=[common], help="ladder / so(2,1) identity residuals")
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--m", type=int, default=0)
    ap.add_argument("--molecule")
    ap.set_defaults(func=cmd_algebra)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep the interpreter quiet on exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
