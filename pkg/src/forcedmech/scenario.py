"""TOML scenario files: loading, validation and CSV emission."""

from __future__ import annotations

import csv
import os
import sys as _sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

if _sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import bundles as bm
from .expressions import ExpressionError, parse
from .integrate import DesiredPath, ForceSamples, ForceSchedule, Trajectory
from .lagrangian import LagrangianSystem

OUT_DIR_ENV = "ENGINE_OUT_DIR"
PICTURES = ("lagrangian", "hamiltonian")


class ConfigError(ValueError):
    """Invalid scenario; ``field`` is the dotted key at fault."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True, eq=False)
class Scenario:
    system: LagrangianSystem
    t0: float
    t1: float
    dt: float
    picture: str
    x0: np.ndarray
    v0: np.ndarray | None
    p0: np.ndarray | None
    forces: ForceSchedule
    desired: DesiredPath | None
    output: Path
    forces_output: Path | None = None

    @property
    def initial(self):
        if self.v0 is not None:
            return bm.TangentVector(self.x0, self.v0)
        return bm.Covector(self.x0, self.p0)


def _table(doc: dict, key: str, required: bool = True) -> dict:
    val = doc.get(key)
    if val is None:
        if required:
            raise ConfigError(key, "missing section")
        return {}
    if not isinstance(val, dict):
        raise ConfigError(key, "must be a table")
    return val


def _number(tab: dict, section: str, key: str, default=None) -> float:
    field = f"{section}.{key}"
    if key not in tab:
        if default is None:
            raise ConfigError(field, "missing")
        return default
    val = tab[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(field, f"must be a number, got {val!r}")
    return float(val)


def _vector(tab: dict, section: str, key: str, dim: int) -> np.ndarray:
    field = f"{section}.{key}"
    val = tab.get(key)
    if not isinstance(val, list) or len(val) != dim:
        raise ConfigError(field, f"must be a list of {dim} numbers")
    if any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in val):
        raise ConfigError(field, "entries must be numbers")
    return np.array(val, float)


def _strings(tab: dict, section: str, key: str, dim: int) -> list[str]:
    field = f"{section}.{key}"
    val = tab.get(key)
    if not isinstance(val, list) or len(val) != dim:
        raise ConfigError(field, f"must be a list of {dim} expressions")
    return [str(c) for c in val]


def _system(doc: dict) -> LagrangianSystem:
    tab = _table(doc, "system")
    dim = tab.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ConfigError("system.dim", f"must be a positive integer, got {dim!r}")
    lag = tab.get("lagrangian")
    if not isinstance(lag, str):
        raise ConfigError("system.lagrangian", "must be a string")
    rho = _strings(tab, "system", "rho", dim) if "rho" in tab else None
    params = tab.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("system.params", "must be a table of numbers")
    for k, v in params.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"system.params.{k}", f"must be a number, got {v!r}")
    # parse piecewise first so an error names the offending field
    pieces = [("system.lagrangian", lag)] + [(f"system.rho[{k}]", r) for k, r in enumerate(rho or [])]
    for where, text in pieces:
        try:
            parse(text, dim, params)
        except ExpressionError as exc:
            raise ConfigError(where, str(exc)) from None
    try:
        return LagrangianSystem.from_text(dim, lag, rho, params, name=tab.get("name", ""))
    except ValueError as exc:
        raise ConfigError("system", str(exc)) from None


def _output_path(doc: dict, source: Path, key: str = "path", default: str | None = None) -> Path | None:
    tab = _table(doc, "output", required=False)
    raw = tab.get(key, default)
    if raw is None:
        return None
    if not isinstance(raw, str) or not raw:
        raise ConfigError(f"output.{key}", "must be a non-empty string")
    path = Path(raw)
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        return Path(out_dir) / path.name
    return path


def load(path: str | os.PathLike, *, need_initial: bool = True, need_desired: bool = False) -> Scenario:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("file", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("file", f"invalid TOML: {exc}") from None
    return from_dict(doc, path, need_initial=need_initial, need_desired=need_desired)


def from_dict(doc: dict[str, Any], source: Path = Path("scenario.toml"), *, need_initial=True, need_desired=False) -> Scenario:
    system = _system(doc)
    m = system.dim
    sim = _table(doc, "simulation")
    t0 = _number(sim, "simulation", "t0", 0.0)
    t1 = _number(sim, "simulation", "t1")
    dt = _number(sim, "simulation", "dt")
    if not dt > 0:
        raise ConfigError("simulation.dt", f"must be positive, got {dt!r}")
    if not t1 > t0:
        raise ConfigError("simulation.t1", f"must exceed simulation.t0 ({t0!r}), got {t1!r}")
    n = round((t1 - t0) / dt)
    if n < 1 or abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ConfigError("simulation.dt", f"does not divide [{t0!r}, {t1!r}] into whole steps")
    picture = sim.get("picture", "lagrangian")
    if picture not in PICTURES:
        raise ConfigError("simulation.picture", f"must be one of {PICTURES}, got {picture!r}")

    x0 = v0 = p0 = None
    if need_initial:
        init = _table(doc, "initial")
        x0 = _vector(init, "initial", "x", m)
        if ("v" in init) == ("p" in init):
            raise ConfigError("initial", "give exactly one of initial.v and initial.p")
        if "v" in init:
            v0 = _vector(init, "initial", "v", m)
        else:
            p0 = _vector(init, "initial", "p", m)

    ftab = _table(doc, "forces", required=False)
    try:
        if "zeta" in ftab:
            forces = ForceSchedule.from_text(_strings(ftab, "forces", "zeta", m), m, system.params)
        else:
            forces = ForceSchedule.zero(m)
    except (ExpressionError, ValueError) as exc:
        raise ConfigError("forces.zeta", str(exc)) from None

    desired = None
    if need_desired:
        dtab = _table(doc, "desired")
        try:
            desired = DesiredPath.from_text(_strings(dtab, "desired", "x", m), m, system.params)
        except (ExpressionError, ValueError) as exc:
            raise ConfigError("desired.x", str(exc)) from None

    output = _output_path(doc, source, default=source.with_suffix(".csv").name)
    forces_output = _output_path(doc, source, "forces_path")
    return Scenario(system, t0, t1, dt, picture, x0, v0, p0, forces, desired, output, forces_output)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "%.17g" % v


def trajectory_rows(sys: LagrangianSystem, traj: Trajectory):
    m = traj.dim
    yield ["t"] + [f"{c}{k}" for c in "xvpf" for k in range(1, m + 1)] + ["H"]
    H = traj.energy(sys)
    for i in range(len(traj)):
        vals = [traj.t[i], *traj.x[i], *traj.v[i], *traj.p[i], *traj.f[i], H[i]]
        yield [_fmt(v) for v in vals]


def force_rows(forces: ForceSamples):
    m = forces.f.shape[1]
    yield ["t"] + [f"f{k}" for k in range(1, m + 1)]
    for i in range(len(forces.t)):
        yield [_fmt(v) for v in (forces.t[i], *forces.f[i])]


def write_csv(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


__all__ = [
    "ConfigError",
    "OUT_DIR_ENV",
    "Scenario",
    "force_rows",
    "from_dict",
    "load",
    "read_csv",
    "trajectory_rows",
    "write_csv",
]
