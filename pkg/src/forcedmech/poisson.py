"""Canonical Poisson bracket on T*M and the bracket form of forced evolution."""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from . import bundles as bm
from .autodiff import EvalPoint, gradient
from .expressions import PHASE, Expression, Var, diff, mul, parse, sub, add, ZERO
from .hamiltonian import DEFAULT_NEWTON, NewtonConfig, hamiltonian_rates
from .lagrangian import LagrangianSystem

ObservableExpr = Expression


def observable(text: str, dim: int, param_names: Iterable[str] = ()) -> ObservableExpr:
    """Parse a function of ``x1..xm, p1..pm``."""
    return parse(text, dim, param_names, kinds=PHASE)


def _point(at: bm.Covector, params) -> EvalPoint:
    return EvalPoint(x=tuple(at.x), p=tuple(at.p), params=params or {})


def phase_gradient(F: ObservableExpr, at: bm.Covector, params=None) -> tuple[np.ndarray, np.ndarray]:
    pt = _point(at, params)
    return gradient(F, pt, "x"), gradient(F, pt, "p")


def poisson_bracket(
    F: ObservableExpr, G: ObservableExpr, at: bm.Covector, params: Mapping[str, float] | None = None
) -> float:
    """``{F, G} = dF/dx . dG/dp - dG/dx . dF/dp``."""
    fx, fp = phase_gradient(F, at, params)
    gx, gp = phase_gradient(G, at, params)
    return float(fx @ gp - gx @ fp)


def bracket_expr(F: ObservableExpr, G: ObservableExpr) -> ObservableExpr:
    """``{F, G}`` as a new expression tree, so brackets can be nested."""
    if F.dim != G.dim:
        raise ValueError("observables live on different phase spaces")
    total = ZERO
    for k in range(F.dim):
        xk, pk = Var("x", k), Var("p", k)
        term = sub(mul(diff(F.root, xk), diff(G.root, pk)), mul(diff(G.root, xk), diff(F.root, pk)))
        total = add(total, term)
    return F.with_root(total)


def product_expr(F: ObservableExpr, G: ObservableExpr) -> ObservableExpr:
    return F.with_root(mul(F.root, G.root))


def bracket_with_hamiltonian(
    sys: LagrangianSystem, F: ObservableExpr, at: bm.Covector, cfg: NewtonConfig = DEFAULT_NEWTON
) -> float:
    """``{F, H}`` with ``dH/dp = Lambda`` and ``dH/dx = -dL/dx o Lambda``."""
    v, dHdx, _ = hamiltonian_rates(sys, at.x, at.p, cfg)
    fx, fp = phase_gradient(F, at, sys.params)
    return float(fx @ np.array(v) - np.array(dHdx) @ fp)


def evolution_residual(
    sys: LagrangianSystem,
    F: ObservableExpr,
    sample: bm.ForceMomentumSample,
    xdot,
    pdot,
    cfg: NewtonConfig = DEFAULT_NEWTON,
) -> float:
    """``dF/dt - {F, H} - dF/dp . (f - rho o Lambda)`` along a sample with rates."""
    at = bm.Covector(sample.x, sample.p)
    v, dHdx, rho = hamiltonian_rates(sys, sample.x, sample.p, cfg)
    fx, fp = phase_gradient(F, at, sys.params)
    dFdt = fx @ np.asarray(xdot, float) + fp @ np.asarray(pdot, float)
    bracket = fx @ np.array(v) - np.array(dHdx) @ fp
    return float(dFdt - bracket - fp @ (sample.f - np.array(rho)))


__all__ = [
    "ObservableExpr",
    "bracket_expr",
    "bracket_with_hamiltonian",
    "evolution_residual",
    "observable",
    "phase_gradient",
    "poisson_bracket",
    "product_expr",
]
