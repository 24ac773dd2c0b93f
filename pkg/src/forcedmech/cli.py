"""``engine`` command line: simulate, invert, check and the aircraft example.

Exit codes: 0 success, 1 failed checks, 2 configuration error, 3 numerical
failure during a run.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import checks
from . import scenario as scn
from .expressions import DomainError
from .hamiltonian import NoConvergenceError, legendre_invert
from .integrate import boundary_momenta, inverse_dynamics, simulate_hamiltonian, simulate_lagrangian, time_grid
from .lagrangian import legendre
from .linalg import SingularMassMatrixError
from .systems import AIRCRAFT, aircraft_position

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# the named ones first for the reader; all derive from ArithmeticError
NUMERIC_ERRORS = (SingularMassMatrixError, NoConvergenceError, DomainError, ArithmeticError)


def _vec(a) -> str:
    return "[" + ", ".join("%.12g" % c for c in a) + "]"


def _runtime_message(exc: Exception) -> str:
    t = getattr(exc, "time", None)
    where = "" if t is None else f" at t={t!r}"
    return f"runtime error{where}: {exc}"


def run_simulation(s: scn.Scenario):
    init = s.initial
    if s.picture == "hamiltonian":
        if s.p0 is None:
            init = legendre(s.system, init)
        return simulate_hamiltonian(s.system, s.forces, init, s.t0, s.t1, s.dt)
    if s.v0 is None:
        init = legendre_invert(s.system, init)
    return simulate_lagrangian(s.system, s.forces, init, s.t0, s.t1, s.dt)


def cmd_simulate(path, out=None) -> int:
    out = out or sys.stdout
    try:
        s = scn.load(path)
    except scn.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        traj = run_simulation(s)
        eta_a, eta_b = boundary_momenta(s.system, traj)
        H = traj.energy(s.system)
    except NUMERIC_ERRORS as exc:
        print(_runtime_message(exc), file=sys.stderr)
        return EXIT_RUNTIME
    scn.write_csv(s.output, scn.trajectory_rows(s.system, traj))
    print(f"wrote {len(traj)} samples to {s.output}", file=out)
    print(f"eta(t0={s.t0:g}) = {_vec(eta_a.p)}", file=out)
    print(f"eta(t1={s.t1:g}) = {_vec(eta_b.p)}", file=out)
    print(f"H(t1) = {H[-1]:.12g}", file=out)
    return EXIT_OK


def cmd_invert(path, out=None) -> int:
    out = out or sys.stdout
    try:
        s = scn.load(path, need_initial=False, need_desired=True)
    except scn.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        forces = inverse_dynamics(s.system, s.desired, time_grid(s.t0, s.t1, s.dt))
    except NUMERIC_ERRORS as exc:
        print(_runtime_message(exc), file=sys.stderr)
        return EXIT_RUNTIME
    target = s.forces_output or s.output
    scn.write_csv(target, scn.force_rows(forces))
    print(f"wrote {len(forces.t)} force samples to {target}", file=out)
    print(f"f(t0) = {_vec(forces.f[0])}", file=out)
    print(f"f(t1) = {_vec(forces.f[-1])}", file=out)
    return EXIT_OK


def cmd_check(suite: str, out=None) -> int:
    out = out or sys.stdout
    ok = True
    if suite in ("identities", "all"):
        res = checks.run_identities()
        print("identities", file=out)
        print(checks.format_results(res), file=out)
        ok &= all(r.passed for r in res)
    if suite in ("variational", "all"):
        rows, res = checks.run_variational()
        print("variational principle on the aircraft (worst of 10 random variations)", file=out)
        print(checks.format_table(rows), file=out)
        print(checks.format_results(res), file=out)
        ok &= all(r.passed for r in res)
    print("ALL PASS" if ok else "SOME CHECKS FAILED", file=out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def bundled(name: str) -> Path:
    return Path(str(resources.files("forcedmech") / "data" / name))


def cmd_aircraft(steady: bool, out=None) -> int:
    out = out or sys.stdout
    name = "aircraft_steady.toml" if steady else "aircraft_free.toml"
    code = cmd_simulate(bundled(name), out)
    if code != EXIT_OK:
        return code
    s = scn.load(bundled(name))
    _, data = scn.read_csv(s.output)
    t, x = data[:, 0], data[:, 1:3]
    if steady:
        print(f"max |x2| = {np.max(np.abs(x[:, 1])):.3e}", file=out)
    else:
        err = np.max(np.abs(x - aircraft_position(t, AIRCRAFT)))
        print(f"max error against the closed form = {err:.3e}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="engine", description="Forced mechanics in four formulations.")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("simulate", help="integrate a scenario and write a trajectory CSV")
    sp.add_argument("scenario")
    ip = sub.add_parser("invert", help="recover the force schedule for a desired path")
    ip.add_argument("scenario")
    cp = sub.add_parser("check", help="run the invariant catalogues")
    cp.add_argument("suite", choices=("identities", "variational", "all"))
    ap = sub.add_parser("aircraft", help="run the bundled aircraft example")
    ap.add_argument("--steady", action="store_true", help="steady horizontal flight instead of free flight")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.scenario)
    if args.command == "invert":
        return cmd_invert(args.scenario)
    if args.command == "check":
        return cmd_check(args.suite)
    return cmd_aircraft(args.steady)


if __name__ == "__main__":
    raise SystemExit(main())
