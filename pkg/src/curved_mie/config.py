"""Run configuration: one JSON document, validated on load."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from scipy import constants as sc

from curved_mie.model import DomainError, PhysicalParams
from curved_mie.spectrum import VALIDATED_MODE, SolvabilityMode


class ConfigError(ValueError):
    pass


# Multiply amu / angstrom / eV inputs by these to get atomic units (hbar = m_e = 1).
ATOMIC_UNITS = {
    "mass": sc.physical_constants["atomic mass constant"][0] / sc.m_e,
    "length": 1e-10 / sc.physical_constants["Bohr radius"][0],
    "energy": sc.eV / sc.physical_constants["Hartree energy"][0],
}

_TOP_KEYS = {"params", "molecules", "mode", "grid", "tolerances", "output", "units"}
_PARAM_KEYS = {"hbar", "mu", "R", "a", "V0", "epsilon", "k"}
_MOLECULE_KEYS = {"epsilon_depth", "a", "reduced_mass", "note"}
_GRID_KEYS = {"N", "k_states"}
_TOL_KEYS = {"eig_tol", "verify_tol"}
_OUTPUT_KEYS = {"format", "path"}
_UNIT_KEYS = {"mass", "length", "energy"}


@dataclass(frozen=True)
class Molecule:
    name: str
    epsilon_depth: float
    a: float
    reduced_mass: float
    note: str = ""


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    molecules: dict[str, Molecule] = field(default_factory=dict)
    mode: SolvabilityMode = VALIDATED_MODE
    N: int = 8192
    k_states: int = 4
    eig_tol: float = 1e-12
    verify_tol: float | None = None
    output_format: str = "csv"
    output_path: str | None = None
    units: dict[str, float] = field(default_factory=lambda: {"mass": 1.0, "length": 1.0, "energy": 1.0})

    def molecule_params(self, name: str) -> PhysicalParams:
        try:
            mol = self.molecules[name]
        except KeyError:
            known = ", ".join(sorted(self.molecules)) or "(none)"
            raise ConfigError(f"unknown molecule {name!r}; known: {known}") from None
        return PhysicalParams(
            hbar=self.params.hbar,
            mu=mol.reduced_mass,
            R=self.params.R,
            a=mol.a,
            V0=2.0 * mol.epsilon_depth,
        )


def _check_keys(where: str, data: Any, allowed: set[str]) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object")
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")
    return data


def _number(where: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def parse_config(data: Any) -> RunConfig:
    data = _check_keys("config", data, _TOP_KEYS)
    units = {"mass": 1.0, "length": 1.0, "energy": 1.0}
    for key, value in _check_keys("units", data.get("units", {}), _UNIT_KEYS).items():
        units[key] = _number(f"units.{key}", value)

    raw = _check_keys("params", data.get("params", {}), _PARAM_KEYS)
    vals = {k: _number(f"params.{k}", v) for k, v in raw.items()}
    if "V0" in vals and "epsilon" in vals:
        raise ConfigError("give either params.V0 or params.epsilon (with k), not both")
    if "k" in vals and "epsilon" not in vals:
        raise ConfigError("params.k needs params.epsilon")
    if "epsilon" in vals:
        vals["V0"] = 2.0 * vals.pop("epsilon") * vals.pop("k", 1.0)
    scale = {"mu": units["mass"], "R": units["length"], "a": units["length"], "V0": units["energy"]}
    vals = {k: v * scale.get(k, 1.0) for k, v in vals.items()}
    try:
        params = PhysicalParams(**vals)
    except DomainError as exc:
        raise ConfigError(f"params: {exc}") from None

    molecules = {}
    for name, entry in _check_keys("molecules", data.get("molecules", {}), set(data.get("molecules", {}))).items():
        entry = _check_keys(f"molecules.{name}", entry, _MOLECULE_KEYS)
        missing = {"epsilon_depth", "a", "reduced_mass"} - set(entry)
        if missing:
            raise ConfigError(f"molecules.{name} is missing {sorted(missing)}")
        molecules[name] = Molecule(
            name=name,
            epsilon_depth=_number(f"molecules.{name}.epsilon_depth", entry["epsilon_depth"]) * units["energy"],
            a=_number(f"molecules.{name}.a", entry["a"]) * units["length"],
            reduced_mass=_number(f"molecules.{name}.reduced_mass", entry["reduced_mass"]) * units["mass"],
            note=str(entry.get("note", "")),
        )

    mode = data.get("mode", VALIDATED_MODE.value)
    try:
        mode = SolvabilityMode(mode)
    except ValueError:
        raise ConfigError(f"unknown mode {mode!r}") from None

    grid = _check_keys("grid", data.get("grid", {}), _GRID_KEYS)
    N = int(_number("grid.N", grid.get("N", 8192)))
    k_states = int(_number("grid.k_states", grid.get("k_states", 4)))
    if N < 64 or N % 2:
        raise ConfigError(f"grid.N must be even and >= 64, got {N}")
    if k_states < 1:
        raise ConfigError("grid.k_states must be >= 1")

    tol = _check_keys("tolerances", data.get("tolerances", {}), _TOL_KEYS)
    eig_tol = _number("tolerances.eig_tol", tol.get("eig_tol", 1e-12))
    verify_tol = tol.get("verify_tol")
    if verify_tol is not None:
        verify_tol = _number("tolerances.verify_tol", verify_tol)

    out = _check_keys("output", data.get("output", {}), _OUTPUT_KEYS)
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")

    return RunConfig(
        params=params,
        molecules=molecules,
        mode=mode,
        N=N,
        k_states=k_states,
        eig_tol=eig_tol,
        verify_tol=verify_tol,
        output_format=fmt,
        output_path=out.get("path"),
        units=units,
    )


def load_config(path: str | os.PathLike | None) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(data)


def thread_count() -> int:
    raw = os.environ.get("CURVED_MIE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CURVED_MIE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("CURVED_MIE_THREADS must be >= 0")
    return n if n > 0 else min(8, os.cpu_count() or 1)
