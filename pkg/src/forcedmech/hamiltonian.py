"""Hamiltonian picture: inverse Legendre map, Hamiltonian, Hamiltonian form, vector field."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bundles as bm
from .expressions import DomainError
from .lagrangian import LagrangianSystem
from .linalg import SingularMassMatrixError, solve_checked


class NoConvergenceError(ArithmeticError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(
            f"Legendre inversion did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 50
    initial_guess: Sequence[float] | str = "zero"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_NEWTON = NewtonConfig()


@dataclass(frozen=True)
class Inversion:
    v: list[float]
    iterations: int
    residual: float


def _residual(jet, p):
    return [jet.gv[k] - p[k] for k in range(len(p))]


def _norm(r):
    return max((abs(c) for c in r), default=0.0)


def invert_legendre(sys: LagrangianSystem, x, p, cfg: NewtonConfig = DEFAULT_NEWTON, guess=None) -> Inversion:
    """Newton iteration for ``dL/dv(x, v) = p`` with halving on residual growth.

    A trial step that leaves the domain of L counts as growth and is halved.

    ``guess`` overrides ``cfg.initial_guess`` (used for warm starts).
    """
    m = sys.dim
    if guess is not None:
        v = [float(c) for c in guess]
    elif isinstance(cfg.initial_guess, str):
        if cfg.initial_guess != "zero":
            raise ValueError(f"unknown initial guess {cfg.initial_guess!r}")
        v = [0.0] * m
    else:
        v = [float(c) for c in cfg.initial_guess]
    jet = sys.jet(x, v)
    r = _residual(jet, p)
    res = _norm(r)
    it = 0
    while res > cfg.tol:
        if it >= cfg.max_iter:
            raise NoConvergenceError(it, res)
        step = solve_checked(jet.hvv, r)
        it += 1
        lam = 1.0
        for _ in range(30):
            trial = [v[k] - lam * step[k] for k in range(m)]
            try:
                tjet = sys.jet(x, trial)
            except DomainError:
                # stepped outside the domain of L: treat as an increase
                tjet, tr, tres = None, None, float("inf")
            else:
                tr = _residual(tjet, p)
                tres = _norm(tr)
            if tres < res or lam < 1e-8:
                break
            lam *= 0.5
        if not tres < res and tres > cfg.tol:
            raise NoConvergenceError(it, res)
        v, jet, r, res = trial, tjet, tr, tres
    return Inversion(v, it, res)


def legendre_invert(
    sys: LagrangianSystem, p: bm.Covector, cfg: NewtonConfig = DEFAULT_NEWTON
) -> bm.TangentVector:
    return bm.TangentVector(p.x, invert_legendre(sys, p.x, p.p, cfg).v)


def hamiltonian(sys: LagrangianSystem, p: bm.Covector, cfg: NewtonConfig = DEFAULT_NEWTON) -> float:
    """``H = p . Lambda(p) - L(x, Lambda(p))``."""
    v = invert_legendre(sys, p.x, p.p, cfg).v
    return float(np.dot(p.p, v)) - sys.value(p.x, v)


def energy(sys: LagrangianSystem, x, v, p) -> float:
    """``p . v - L(x, v)``; equals H(x, p) whenever p is the Legendre image of v."""
    return float(np.dot(p, v)) - sys.value(x, v)


def hamiltonian_rates(sys: LagrangianSystem, x, p, cfg: NewtonConfig = DEFAULT_NEWTON, guess=None):
    """``(Lambda, dH/dx, rho o Lambda)`` at (x, p).

    dH/dx is ``-dL/dx(x, Lambda)`` by the envelope identity, so the Newton
    solve is never differentiated.
    """
    v = invert_legendre(sys, x, p, cfg, guess).v
    jet = sys.jet(x, v)
    return v, [-g for g in jet.gx], sys.rho_at(x, v)


def theta_form(sys: LagrangianSystem, p: bm.Covector, cfg: NewtonConfig = DEFAULT_NEWTON):
    """Hamiltonian form ``theta = theta_k dx^k + theta^k dp_k``.

    Returns ``(theta_lower, theta_upper)`` with
    ``theta_lower = dH/dx + rho o Lambda`` and ``theta_upper = Lambda``.
    """
    v, dHdx, rho = hamiltonian_rates(sys, p.x, p.p, cfg)
    lower = np.array(dHdx) + np.array(rho)
    return lower, np.array(v)


def vector_field_Z(sys: LagrangianSystem, p: bm.Covector, cfg: NewtonConfig = DEFAULT_NEWTON) -> bm.TTStarPoint:
    """``Z = (x, p, theta_upper, -theta_lower)``, the image of which is D0."""
    lower, upper = theta_form(sys, p, cfg)
    return bm.TTStarPoint(p.x, p.p, upper, -lower)


def vector_field_Z_via_beta(sys: LagrangianSystem, p: bm.Covector, cfg: NewtonConfig = DEFAULT_NEWTON) -> bm.TTStarPoint:
    """Same field built as ``-beta^-1(theta)``."""
    lower, upper = theta_form(sys, p, cfg)
    return bm.beta_inv(bm.TStarTStarPoint(p.x, p.p, -lower, -upper))


def hamilton_residual(
    sys: LagrangianSystem,
    sample: bm.ForceMomentumSample,
    pdot,
    xdot,
    cfg: NewtonConfig = DEFAULT_NEWTON,
) -> np.ndarray:
    """``(xdot - dH/dp, pdot - f + dH/dx + rho o Lambda)``; zero on forced flows."""
    v, dHdx, rho = hamiltonian_rates(sys, sample.x, sample.p, cfg)
    xdot = np.asarray(xdot, float)
    pdot = np.asarray(pdot, float)
    return np.concatenate(
        [xdot - np.array(v), pdot - sample.f + np.array(dHdx) + np.array(rho)]
    )


__all__ = [
    "DEFAULT_NEWTON",
    "Inversion",
    "NewtonConfig",
    "NoConvergenceError",
    "SingularMassMatrixError",
    "energy",
    "hamilton_residual",
    "hamiltonian",
    "hamiltonian_rates",
    "invert_legendre",
    "legendre_invert",
    "theta_form",
    "vector_field_Z",
    "vector_field_Z_via_beta",
]
