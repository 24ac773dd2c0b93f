"""Lagrangian picture of forced dynamics with a non-potential force form.

The system is described by a Lagrangian L(x, v) and a force form
``rho = rho_k(x, v) dx^k``; dynamics is generated by ``lam = dL - rho``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import bundles as bm
from .autodiff import EvalPoint, LagrangianJet, compiled
from .expressions import STATE, Expression, constant, parse
from .linalg import COND_LIMIT, SingularMassMatrixError, solve_checked


@dataclass(frozen=True, eq=False)
class LagrangianSystem:
    dim: int
    lagrangian: Expression
    rho: tuple[Expression, ...]
    params: Mapping[str, float] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if len(self.rho) != self.dim:
            raise ValueError(f"rho needs {self.dim} components, got {len(self.rho)}")
        for e in (self.lagrangian, *self.rho):
            if e.dim != self.dim or set(e.kinds) - set(STATE):
                raise ValueError(f"expression {e} does not live on TM of dimension {self.dim}")
            missing = e.params - set(self.params)
            if missing:
                raise ValueError(f"no value for parameter(s) {sorted(missing)} in {e}")
        object.__setattr__(self, "params", dict(self.params))
        rho_fns = tuple(compiled(e) for e in self.rho)
        object.__setattr__(self, "_rho_fns", rho_fns)

    @classmethod
    def from_text(
        cls,
        dim: int,
        lagrangian: str,
        rho: Sequence[str] | None = None,
        params: Mapping[str, float] | None = None,
        name: str = "",
    ) -> "LagrangianSystem":
        params = {k: float(v) for k, v in (params or {}).items()}
        L = parse(lagrangian, dim, params)
        if rho is None:
            rho_e = tuple(constant(0.0, dim) for _ in range(dim))
        else:
            rho_e = tuple(parse(r, dim, params) for r in rho)
        return cls(dim, L, rho_e, params, name)

    @property
    def is_potential(self) -> bool:
        return all(r.is_zero() for r in self.rho)

    # fast paths on plain sequences -------------------------------------

    def jet(self, x, v) -> LagrangianJet:
        return LagrangianJet(self.lagrangian, x, v, self.params)

    def value(self, x, v) -> float:
        return compiled(self.lagrangian)(x, v, (), 0.0, self.params)[0]

    def rho_at(self, x, v) -> list[float]:
        prm = self.params
        return [fn(x, v, (), 0.0, prm)[0] for fn in self._rho_fns]

    def point(self, x, v) -> EvalPoint:
        return EvalPoint(x=tuple(x), v=tuple(v), params=self.params)


def accel(sys: LagrangianSystem, x, v, f, limit: float = COND_LIMIT) -> list[float]:
    """Accelerations solving the forced Euler-Lagrange equations at (x, v)."""
    jet = sys.jet(x, v)
    rho = sys.rho_at(x, v)
    m = sys.dim
    rhs = [
        f[k] + jet.gx[k] - rho[k] - sum(jet.hvx[k][l] * v[l] for l in range(m))
        for k in range(m)
    ]
    return solve_checked(jet.hvv, rhs, limit)


def pdot_along(jet: LagrangianJet, v, a) -> list[float]:
    """d/dt of dL/dv along a germ, by the chain rule through the Hessians."""
    m = len(v)
    return [
        sum(jet.hvx[k][l] * v[l] for l in range(m)) + sum(jet.hvv[k][l] * a[l] for l in range(m))
        for k in range(m)
    ]


# ---------------------------------------------------------------------------
# operations on bundle points
# ---------------------------------------------------------------------------


def legendre(sys: LagrangianSystem, tv: bm.TangentVector) -> bm.Covector:
    """``p = dL/dv``; the force form is vertical and does not contribute."""
    return bm.Covector(tv.x, sys.jet(tv.x, tv.v).gv)


def lambda_form(sys: LagrangianSystem, tv: bm.TangentVector) -> bm.TStarTPoint:
    """Coordinates of ``dL - rho`` at ``tv`` as a point of T*TM."""
    jet = sys.jet(tv.x, tv.v)
    rho = sys.rho_at(tv.x, tv.v)
    a = np.array(jet.gx) - np.array(rho)
    return bm.TStarTPoint(tv.x, tv.v, a, jet.gv)


def legendre_via_alpha(sys: LagrangianSystem, tv: bm.TangentVector) -> bm.Covector:
    """Legendre map as the T*M-projection of ``alpha^-1 o lam``."""
    z = bm.alpha_inv(lambda_form(sys, tv))
    return bm.Covector(z.x, z.p)


def euler_lagrange(sys: LagrangianSystem, s: bm.SecondTangent) -> bm.Covector:
    """External force realizing the germ ``s``.

    ``f_k = d2L/dv_k dx_l v^l + d2L/dv_k dv_l a^l - dL/dx_k + rho_k``.
    """
    jet = sys.jet(s.x, s.v)
    rho = sys.rho_at(s.x, s.v)
    pdot = pdot_along(jet, s.v, s.a)
    return bm.Covector(s.x, [pdot[k] - jet.gx[k] + rho[k] for k in range(sys.dim)])


def solve_accel(
    sys: LagrangianSystem, tv: bm.TangentVector, f: bm.Covector, limit: float = COND_LIMIT
) -> bm.SecondTangent:
    if not np.array_equal(tv.x, f.x):
        raise bm.BaseMismatchError(f"force applied at {f.x}, state at {tv.x}")
    return bm.SecondTangent(tv.x, tv.v, accel(sys, tv.x, tv.v, f.p, limit))


def prolonged_momentum(sys: LagrangianSystem, s: bm.SecondTangent) -> bm.TTStarPoint:
    """Tangent prolongation of the Legendre image along the germ ``s``."""
    jet = sys.jet(s.x, s.v)
    return bm.TTStarPoint(s.x, jet.gv, s.v, pdot_along(jet, s.v, s.a))


def d0_residual(sys: LagrangianSystem, w: bm.TTStarPoint) -> np.ndarray:
    """Defect of ``alpha(w) = lam(x, v)``; a-slot block first, then b-slot."""
    jet = sys.jet(w.x, w.v)
    rho = np.array(sys.rho_at(w.x, w.v))
    return np.concatenate([w.pdot - np.array(jet.gx) + rho, w.p - np.array(jet.gv)])


def tulczyjew_identity_residual(sys: LagrangianSystem, s: bm.SecondTangent) -> np.ndarray:
    """``chi(EL(s), t(P o s)) - alpha^-1(lam(x, v))`` in the (p, pdot) slots.

    Vanishes for every germ, on or off shell.
    """
    f = euler_lagrange(sys, s)
    lhs = bm.chi(f, prolonged_momentum(sys, s))
    rhs = bm.alpha_inv(lambda_form(sys, bm.TangentVector(s.x, s.v)))
    return np.concatenate([lhs.p - rhs.p, lhs.pdot - rhs.pdot])


__all__ = [
    "LagrangianSystem",
    "SingularMassMatrixError",
    "accel",
    "d0_residual",
    "euler_lagrange",
    "lambda_form",
    "legendre",
    "legendre_via_alpha",
    "pdot_along",
    "prolonged_momentum",
    "solve_accel",
    "tulczyjew_identity_residual",
]
