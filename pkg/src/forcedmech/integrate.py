"""Fixed-step RK4 in both pictures, boundary momenta and inverse dynamics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import bundles as bm
from .autodiff import compiled, time_jet
from .expressions import TIME, Expression, parse
from .hamiltonian import DEFAULT_NEWTON, NewtonConfig, NoConvergenceError, invert_legendre
from .lagrangian import LagrangianSystem, accel, euler_lagrange
from .linalg import SingularMassMatrixError


def _time_exprs(texts, dim: int, params: Mapping[str, float], what: str) -> tuple[Expression, ...]:
    if len(texts) != dim:
        raise ValueError(f"{what} needs {dim} components, got {len(texts)}")
    out = []
    for t in texts:
        e = t if isinstance(t, Expression) else parse(str(t), dim, params, kinds=TIME)
        if set(e.kinds) - set(TIME):
            raise ValueError(f"{what} component {e} may only depend on t")
        missing = e.params - set(params)
        if missing:
            raise ValueError(f"no value for parameter(s) {sorted(missing)} in {what}")
        out.append(e)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ForceSchedule:
    """External force ``zeta(t)`` as one expression in ``t`` per coordinate."""

    components: tuple[Expression, ...]
    params: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_text(cls, texts: Sequence[str], dim: int, params: Mapping[str, float] | None = None):
        params = dict(params or {})
        return cls(_time_exprs(texts, dim, params, "force schedule"), params)

    @classmethod
    def zero(cls, dim: int) -> "ForceSchedule":
        return cls.from_text(["0"] * dim, dim)

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __call__(self, t: float) -> list[float]:
        prm = self.params
        return [compiled(c)((), (), (), t, prm)[0] for c in self.components]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples on a uniform grid; rows of x, v, p, f are per time."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    p: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        if n == 0:
            raise ValueError("empty trajectory")
        for name in ("x", "v", "p", "f"):
            arr = np.asarray(getattr(self, name), float)
            if arr.ndim != 2 or arr.shape[0] != n:
                raise ValueError(f"trajectory field {name} has shape {arr.shape}, expected ({n}, m)")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "t", np.asarray(self.t, float))

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def __len__(self) -> int:
        return len(self.t)

    def energy(self, sys: LagrangianSystem) -> np.ndarray:
        """``p . v - L`` per sample."""
        return np.array(
            [self.p[i] @ self.v[i] - sys.value(self.x[i], self.v[i]) for i in range(len(self))]
        )


def time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """``t0 + i dt`` for i = 0..n; the span must be a whole number of steps."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t1 > t0:
        raise ValueError(f"t1 must exceed t0, got [{t0}, {t1}]")
    n = int(round((t1 - t0) / dt))
    if n < 1 or abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError(f"interval [{t0}, {t1}] is not a whole number of steps dt={dt}")
    return t0 + dt * np.arange(n + 1)


def _rk4(rate, y0: list[float], ts: np.ndarray) -> list[list[float]]:
    n = len(y0)
    ys = [list(map(float, y0))]
    y = ys[0]
    for i in range(len(ts) - 1):
        t = float(ts[i])
        h = float(ts[i + 1] - ts[i])
        k1 = rate(t, y)
        k2 = rate(t + 0.5 * h, [y[j] + 0.5 * h * k1[j] for j in range(n)])
        k3 = rate(t + 0.5 * h, [y[j] + 0.5 * h * k2[j] for j in range(n)])
        k4 = rate(t + h, [y[j] + h * k3[j] for j in range(n)])
        y = [y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) for j in range(n)]
        ys.append(y)
    return ys


def _forces(sched: ForceSchedule, m: int):
    if sched.dim != m:
        raise ValueError(f"force schedule has {sched.dim} components, system has {m}")
    if sched.is_zero:
        zero = [0.0] * m
        return lambda t: zero
    return sched


def simulate_lagrangian(
    sys: LagrangianSystem, sched: ForceSchedule, init: bm.TangentVector, t0: float, t1: float, dt: float
) -> Trajectory:
    """RK4 on ``(x, xdot)`` with accelerations from the forced Euler-Lagrange equations."""
    m = sys.dim
    ts = time_grid(t0, t1, dt)
    zeta = _forces(sched, m)

    def rate(t, y):
        x, v = y[:m], y[m:]
        try:
            a = accel(sys, x, v, zeta(t))
        except SingularMassMatrixError as exc:
            raise SingularMassMatrixError(exc.condition, t) from None
        return v + a

    ys = np.array(_rk4(rate, [*init.x, *init.v], ts))
    x, v = ys[:, :m], ys[:, m:]
    p = np.array([sys.jet(x[i], v[i]).gv for i in range(len(ts))])
    f = np.array([zeta(t) for t in ts], float).reshape(len(ts), m)
    return Trajectory(ts, x, v, p, f)


def simulate_hamiltonian(
    sys: LagrangianSystem,
    sched: ForceSchedule,
    init_p: bm.Covector,
    t0: float,
    t1: float,
    dt: float,
    cfg: NewtonConfig = DEFAULT_NEWTON,
) -> Trajectory:
    """RK4 on ``(x, p)`` with rates ``(dH/dp, zeta - dH/dx - rho o Lambda)``.

    Each Legendre inversion is warm-started from the previous velocity.
    """
    m = sys.dim
    ts = time_grid(t0, t1, dt)
    zeta = _forces(sched, m)
    last = [None]

    def velocity(t, x, p):
        try:
            inv = invert_legendre(sys, x, p, cfg, last[0])
        except SingularMassMatrixError as exc:
            raise SingularMassMatrixError(exc.condition, t) from None
        except NoConvergenceError as exc:
            exc.time = t
            raise
        last[0] = inv.v
        return inv.v

    def rate(t, y):
        x, p = y[:m], y[m:]
        v = velocity(t, x, p)
        gx = sys.jet(x, v).gx
        rho = sys.rho_at(x, v)
        f = zeta(t)
        return v + [f[k] + gx[k] - rho[k] for k in range(m)]

    ys = np.array(_rk4(rate, [*init_p.x, *init_p.p], ts))
    x, p = ys[:, :m], ys[:, m:]
    v = np.array([velocity(ts[i], x[i], p[i]) for i in range(len(ts))])
    f = np.array([zeta(t) for t in ts], float).reshape(len(ts), m)
    return Trajectory(ts, x, v, p, f)


def boundary_momenta(sys: LagrangianSystem, traj: Trajectory) -> tuple[bm.Covector, bm.Covector]:
    """Legendre images of the first and last samples."""
    first = bm.Covector(traj.x[0], sys.jet(traj.x[0], traj.v[0]).gv)
    last = bm.Covector(traj.x[-1], sys.jet(traj.x[-1], traj.v[-1]).gv)
    return first, last


# ---------------------------------------------------------------------------
# inverse dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DesiredPath:
    """Coordinate path ``x(t)`` as expressions; derivatives come from AD in t."""

    components: tuple[Expression, ...]
    params: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_text(cls, texts: Sequence[str], dim: int, params: Mapping[str, float] | None = None):
        params = dict(params or {})
        return cls(_time_exprs(texts, dim, params, "desired path"), params)

    def sample(self, ts) -> "SampledPath":
        jets = np.array([[time_jet(c, float(t), self.params) for c in self.components] for t in ts])
        return SampledPath(np.asarray(ts, float), jets[:, :, 0], jets[:, :, 1], jets[:, :, 2])


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Position, velocity and acceleration samples on a time grid."""

    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    xddot: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in ("x", "xdot", "xddot"):
            arr = np.asarray(getattr(self, name), float)
            if arr.ndim != 2 or arr.shape[0] != n:
                raise ValueError(f"path field {name} has shape {arr.shape}, expected ({n}, m)")
            object.__setattr__(self, name, arr)
        if len({a.shape for a in (self.x, self.xdot, self.xddot)}) != 1:
            raise ValueError("path fields disagree in dimension")
        object.__setattr__(self, "t", np.asarray(self.t, float))

    @classmethod
    def from_trajectory(cls, traj: Trajectory) -> "SampledPath":
        """Take x, v from the samples; differentiate v with 4th-order differences."""
        return cls(traj.t, traj.x, traj.v, differentiate(traj.v, traj.dt))


_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_EDGE = [
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
]


def differentiate(y: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative of uniformly sampled rows."""
    y = np.asarray(y, float)
    n = y.shape[0]
    if n < 5:
        raise ValueError("need at least 5 samples to differentiate")
    d = np.empty_like(y)
    d[2:-2] = np.tensordot(_CENTRAL, np.stack([y[k : n - 4 + k] for k in range(5)]), axes=1)
    d[0] = _EDGE[0] @ y[:5]
    d[1] = _EDGE[1] @ y[:5]
    d[-1] = -(_EDGE[0] @ y[::-1][:5])
    d[-2] = -(_EDGE[1] @ y[::-1][:5])
    return d / h


@dataclass(frozen=True, eq=False)
class ForceSamples:
    t: np.ndarray
    f: np.ndarray


def inverse_dynamics(sys: LagrangianSystem, desired, ts=None) -> ForceSamples:
    """External force needed to follow ``desired``, read off the Euler-Lagrange map.

    ``desired`` is a :class:`DesiredPath` (then ``ts`` is the sample grid)
    or a :class:`SampledPath`.
    """
    if isinstance(desired, DesiredPath):
        if ts is None:
            raise ValueError("a time grid is needed to sample a desired path")
        desired = desired.sample(ts)
    if desired.x.shape[1] != sys.dim:
        raise ValueError(f"desired path has dimension {desired.x.shape[1]}, system has {sys.dim}")
    f = np.array(
        [
            euler_lagrange(sys, bm.SecondTangent(desired.x[i], desired.xdot[i], desired.xddot[i])).p
            for i in range(len(desired.t))
        ]
    ).reshape(len(desired.t), sys.dim)
    return ForceSamples(desired.t, f)


__all__ = [
    "DesiredPath",
    "ForceSamples",
    "ForceSchedule",
    "SampledPath",
    "Trajectory",
    "boundary_momenta",
    "differentiate",
    "inverse_dynamics",
    "simulate_hamiltonian",
    "simulate_lagrangian",
    "time_grid",
]
