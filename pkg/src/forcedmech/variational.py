"""Quadrature checks of the variational principle with boundary momenta and forces.

For a force-momentum trajectory and a variation ``dx(t)`` the principle reads

    int <lam, d(dx)/dt> = -int <zeta, dx> + <eta(b), dx(b)> - <eta(a), dx(a)>

where the left side is ``int (dL/dx - rho) . dx + dL/dv . dx'``. Unlike
Hamilton's principle the variation need not vanish at the endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .autodiff import time_jet
from .expressions import Expression
from .integrate import ForceSamples, ForceSchedule, SampledPath, Trajectory, _time_exprs, boundary_momenta
from .lagrangian import LagrangianSystem, pdot_along


class NonPotentialSystemError(ValueError):
    """The action is only defined when the force form vanishes."""


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Variation:
    """Variation ``dx(t)``; its time derivative comes from AD."""

    components: tuple[Expression, ...]
    params: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_text(cls, texts: Sequence[str], dim: int, params: Mapping[str, float] | None = None):
        params = dict(params or {})
        return cls(_time_exprs(texts, dim, params, "variation"), params)

    @property
    def dim(self) -> int:
        return len(self.components)

    def sample(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """``(dx, dx')`` as arrays of shape (N, m)."""
        jets = np.array([[time_jet(c, float(t), self.params)[:2] for c in self.components] for t in ts])
        jets = jets.reshape(len(ts), self.dim, 2)
        return jets[:, :, 0], jets[:, :, 1]


def random_polynomial_variations(
    rng: np.random.Generator, dim: int, count: int, t0: float, t1: float, degree: int = 3
) -> list[Variation]:
    """Polynomials in ``s = (t - t0)/(t1 - t0)`` with coefficients in [-1, 1].

    They do not vanish at the endpoints in general.
    """
    span = t1 - t0
    out = []
    for _ in range(count):
        comps = []
        for _k in range(dim):
            c = rng.uniform(-1.0, 1.0, degree + 1)
            s = f"((t - {float(t0)!r})/{float(span)!r})"
            comps.append(" + ".join(f"({float(c[j])!r})*{s}^{j}" for j in range(degree + 1)))
        out.append(Variation.from_text(comps, dim))
    return out


def pinned_sine_variation(dim: int, t0: float, t1: float, amplitude: float = 1.0) -> Variation:
    """``sin(pi (t - t0)/(t1 - t0))`` in every coordinate; zero at both ends."""
    s = f"{float(amplitude)!r}*sin(3.141592653589793*(t - {float(t0)!r})/{float(t1 - t0)!r})"
    return Variation.from_text([s] * dim, dim)


def _check_grid(t: np.ndarray) -> float:
    t = np.asarray(t, float)
    if t.ndim != 1 or len(t) < 2:
        raise GridMismatchError("need at least two samples")
    h = np.diff(t)
    if not np.all(h > 0) or np.max(np.abs(h - h[0])) > 1e-9 * max(1.0, abs(h[0])):
        raise GridMismatchError("samples are not on a uniform increasing grid")
    return float((t[-1] - t[0]) / (len(t) - 1))


def simpson(y, t) -> float:
    """Composite Simpson on a uniform grid; a trailing odd panel gets the trapezoid rule."""
    y = np.asarray(y, float)
    h = _check_grid(t)
    if len(y) != len(t):
        raise GridMismatchError(f"{len(y)} values on a grid of {len(t)} points")
    n = len(y) - 1
    even = n - (n % 2)
    total = 0.0
    if even:
        total = h / 3.0 * (y[0] + y[even] + 4.0 * y[1:even:2].sum() + 2.0 * y[2:even - 1:2].sum())
    if n % 2:
        total += 0.5 * h * (y[-2] + y[-1])
    return float(total)


def action(sys: LagrangianSystem, traj: Trajectory) -> float:
    """``int L(x, v) dt`` along the samples."""
    if not sys.is_potential:
        raise NonPotentialSystemError(
            f"system {sys.name or sys.lagrangian} has a non-potential force form; the action is undefined"
        )
    vals = [sys.value(traj.x[i], traj.v[i]) for i in range(len(traj))]
    return simpson(vals, traj.t)


def _forces_on(sched, traj: Trajectory) -> np.ndarray:
    if isinstance(sched, ForceSchedule):
        if sched.dim != traj.dim:
            raise GridMismatchError(f"force schedule has {sched.dim} components, trajectory {traj.dim}")
        return np.array([sched(t) for t in traj.t], float).reshape(len(traj), traj.dim)
    if isinstance(sched, ForceSamples):
        if sched.f.shape != traj.x.shape or not np.array_equal(sched.t, traj.t):
            raise GridMismatchError("force samples and trajectory use different grids")
        return np.asarray(sched.f, float)
    raise TypeError(f"unsupported force description {type(sched).__name__}")


def lam_pairing(sys: LagrangianSystem, x, v, dx, ddx) -> np.ndarray:
    """``<lam, dx'>`` per sample: ``(dL/dx - rho) . dx + dL/dv . dx'``."""
    out = np.empty(len(x))
    for i in range(len(x)):
        jet = sys.jet(x[i], v[i])
        rho = sys.rho_at(x[i], v[i])
        out[i] = sum(
            (jet.gx[k] - rho[k]) * dx[i][k] + jet.gv[k] * ddx[i][k] for k in range(sys.dim)
        )
    return out


@dataclass(frozen=True)
class PrincipleTerms:
    lhs: float
    force_work: float
    boundary: float

    @property
    def residual(self) -> float:
        return self.lhs - (-self.force_work + self.boundary)


def principle_terms(sys: LagrangianSystem, traj: Trajectory, sched, var: Variation) -> PrincipleTerms:
    if var.dim != sys.dim or traj.dim != sys.dim:
        raise GridMismatchError("variation, trajectory and system differ in dimension")
    _check_grid(traj.t)
    zeta = _forces_on(sched, traj)
    dx, ddx = var.sample(traj.t)
    lhs = simpson(lam_pairing(sys, traj.x, traj.v, dx, ddx), traj.t)
    work = simpson(np.einsum("ij,ij->i", zeta, dx), traj.t)
    eta_a, eta_b = boundary_momenta(sys, traj)
    boundary = float(eta_b.p @ dx[-1] - eta_a.p @ dx[0])
    return PrincipleTerms(lhs, work, boundary)


def principle_residual(sys: LagrangianSystem, traj: Trajectory, sched, var: Variation) -> float:
    """Left side minus right side of the principle; quadrature error on solutions."""
    return principle_terms(sys, traj, sched, var).residual


def integration_by_parts_residual(sys: LagrangianSystem, path: SampledPath, var: Variation) -> float:
    """``int <lam, dx'>`` minus ``-int <EL(x''), dx> + <P(b), dx(b)> - <P(a), dx(a)>``.

    Holds for any smooth path, solution or not.
    """
    _check_grid(path.t)
    dx, ddx = var.sample(path.t)
    lhs = simpson(lam_pairing(sys, path.x, path.xdot, dx, ddx), path.t)
    el = np.empty(len(path.t))
    for i in range(len(path.t)):
        jet = sys.jet(path.x[i], path.xdot[i])
        rho = sys.rho_at(path.x[i], path.xdot[i])
        pdot = pdot_along(jet, path.xdot[i], path.xddot[i])
        el[i] = sum((pdot[k] - jet.gx[k] + rho[k]) * dx[i][k] for k in range(sys.dim))
    pa = np.array(sys.jet(path.x[0], path.xdot[0]).gv)
    pb = np.array(sys.jet(path.x[-1], path.xdot[-1]).gv)
    rhs = -simpson(el, path.t) + pb @ dx[-1] - pa @ dx[0]
    return float(lhs - rhs)


__all__ = [
    "GridMismatchError",
    "NonPotentialSystemError",
    "PrincipleTerms",
    "Variation",
    "action",
    "integration_by_parts_residual",
    "lam_pairing",
    "pinned_sine_variation",
    "principle_residual",
    "principle_terms",
    "random_polynomial_variations",
    "simpson",
]
