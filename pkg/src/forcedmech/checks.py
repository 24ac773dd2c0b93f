"""Invariant catalogues run by ``engine check``.

Each check returns the largest residual seen over its random sample and
the tolerance it is held to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bundles as bm
from . import systems
from .autodiff import EvalPoint, evaluate
from .hamiltonian import hamiltonian, legendre_invert
from .integrate import ForceSchedule, simulate_lagrangian
from .lagrangian import legendre, tulczyjew_identity_residual
from .poisson import bracket_expr, observable, poisson_bracket, product_expr
from .variational import principle_residual, random_polynomial_variations

SEED = 20240611
N_POINTS = 1000


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def _max(values) -> float:
    return float(max((float(np.max(np.abs(v))) for v in values), default=0.0))


def _random_points(cls, rng, n=N_POINTS):
    return [cls.random(rng, int(rng.integers(1, 4)), 5.0) for _ in range(n)]


def _diff(a, b) -> float:
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a.as_tuple(), b.as_tuple()))


def check_kappa_involution(rng) -> CheckResult:
    pts = _random_points(bm.TTPoint, rng)
    return CheckResult("kappa11 involution", max(_diff(bm.kappa11(bm.kappa11(w)), w) for w in pts), 0.0)


def check_kappa_higher(rng) -> CheckResult:
    pts = _random_points(bm.TT2Point, rng)
    r = max(_diff(bm.kappa21(bm.kappa12(w)), w) for w in pts)
    return CheckResult("kappa12/kappa21 inverse pair", r, 0.0)


def check_F_composition(rng) -> CheckResult:
    r = 0.0
    for w in _random_points(bm.TTPoint, rng):
        ff = bm.F11(bm.F11(w))
        r = max(r, float(np.max(np.abs(np.concatenate([ff.dx, ff.dv])))))
    for w in _random_points(bm.TT2Point, rng):
        r = max(r, _diff(bm.F21(bm.F21(w)), bm.F22(w)))
        for comp in (bm.F22(bm.F21(w)), bm.F21(bm.F22(w)), bm.F22(bm.F22(w))):
            r = max(r, float(np.max(np.abs(np.concatenate([comp.dx, comp.dv, comp.da])))))
    return CheckResult("F(k;n) composition table", r, 1e-15)


def check_alpha_kappa_duality(rng) -> CheckResult:
    r = 0.0
    for z in _random_points(bm.TTStarPoint, rng):
        m = z.dim
        w = bm.TTPoint(z.x, z.v, rng.uniform(-5, 5, m), rng.uniform(-5, 5, m))
        r = max(r, abs(bm.pair_TT(bm.alpha(z), w) - bm.tangent_pair(z, bm.kappa11(w))))
    return CheckResult("alpha/kappa duality", r, 1e-15)


def check_beta_antisymmetry(rng) -> CheckResult:
    r = 0.0
    for u in _random_points(bm.TTStarPoint, rng):
        m = u.dim
        u2 = bm.TTStarPoint(u.x, u.p, rng.uniform(-5, 5, m), rng.uniform(-5, 5, m))
        a = bm.pair_TsTs(bm.beta(u), u2)
        b = bm.pair_TsTs(bm.beta(u2), u)
        r = max(r, abs(a + b), abs(a - (u.pdot @ u2.v - u.v @ u2.pdot)))
    return CheckResult("beta antisymmetry", r, 1e-15)


def check_round_trips(rng) -> CheckResult:
    r = 0.0
    for z in _random_points(bm.TTStarPoint, rng):
        r = max(r, _diff(bm.alpha_inv(bm.alpha(z)), z), _diff(bm.beta_inv(bm.beta(z)), z))
    return CheckResult("alpha and beta round trips", r, 0.0)


def _random_germ(rng, m):
    return bm.SecondTangent(rng.uniform(-1, 1, m), rng.uniform(-3, 3, m), rng.uniform(-3, 3, m))


def check_tulczyjew(rng) -> CheckResult:
    r = 0.0
    for sys in systems.corpus():
        for _ in range(N_POINTS // 4):
            r = max(r, _max([tulczyjew_identity_residual(sys, _random_germ(rng, sys.dim))]))
    return CheckResult("off-shell Tulczyjew identity", r, 1e-12)


def check_legendre_round_trip(rng) -> CheckResult:
    r = 0.0
    for sys in [*systems.corpus(), systems.relativistic_particle()]:
        scale = 2.5 if sys.name == "relativistic particle" else 3.0
        for _ in range(100):
            tv = bm.TangentVector(rng.uniform(-1, 1, sys.dim), rng.uniform(-scale, scale, sys.dim))
            back = legendre_invert(sys, legendre(sys, tv))
            r = max(r, float(np.max(np.abs(back.v - tv.v))))
    return CheckResult("Legendre round trip", r, 1e-12)


_OBS = ["x1^2*p1 + sin(p1)", "p1^3 - x1*p1", "cos(x1)*exp(0.3*p1)", "x1*p1^2 + 2*x1"]


def check_poisson(rng) -> list[CheckResult]:
    F, G, K = (observable(s, 1) for s in _OBS[:3])
    anti = leib = jac = 0.0
    jac_terms = [
        bracket_expr(F, bracket_expr(G, K)),
        bracket_expr(G, bracket_expr(K, F)),
        bracket_expr(K, bracket_expr(F, G)),
    ]
    GK = product_expr(G, K)
    for _ in range(100):
        at = bm.Covector(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        anti = max(anti, abs(poisson_bracket(F, G, at) + poisson_bracket(G, F, at)))
        lhs = poisson_bracket(F, GK, at)
        pt = EvalPoint(x=tuple(at.x), p=tuple(at.p))
        rhs = poisson_bracket(F, G, at) * evaluate(K, pt) + evaluate(G, pt) * poisson_bracket(F, K, at)
        leib = max(leib, abs(lhs - rhs))
        jac = max(jac, abs(sum(evaluate(e, pt) for e in jac_terms)))
    return [
        CheckResult("Poisson antisymmetry", anti, 0.0),
        CheckResult("Poisson Leibniz rule", leib, 1e-12),
        CheckResult("Poisson Jacobi identity", jac, 1e-6),
    ]


def check_G_M_sign(rng) -> CheckResult:
    """``L(Lambda(p)) - p . Lambda(p) = -H(p)``."""
    r = 0.0
    for sys in systems.corpus():
        for _ in range(50):
            p = bm.Covector(rng.uniform(-1, 1, sys.dim), rng.uniform(-3, 3, sys.dim))
            tv = legendre_invert(sys, p)
            w = bm.TTStarPoint(p.x, p.p, tv.v, np.zeros(sys.dim))
            r = max(r, abs(sys.value(tv.x, tv.v) - bm.G_M(w) + hamiltonian(sys, p)))
    return CheckResult("G_M and the Hamiltonian", r, 1e-12)


IDENTITY_CHECKS: list[Callable] = [
    check_kappa_involution,
    check_kappa_higher,
    check_F_composition,
    check_alpha_kappa_duality,
    check_beta_antisymmetry,
    check_round_trips,
    check_tulczyjew,
    check_legendre_round_trip,
    check_G_M_sign,
    check_poisson,
]


def run_identities(seed: int = SEED) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out: list[CheckResult] = []
    for check in IDENTITY_CHECKS:
        res = check(rng)
        out.extend(res if isinstance(res, list) else [res])
    return out


# ---------------------------------------------------------------------------
# variational principle on the aircraft
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    residual: float
    ratio: float | None


VARIATIONAL_DTS = (0.1, 0.05, 0.025, 0.0125)


def variational_table(dts=VARIATIONAL_DTS, n_variations: int = 10, seed: int = SEED) -> list[ConvergenceRow]:
    """Worst principle residual over a random polynomial family, per step size."""
    sys = systems.aircraft()
    a = systems.AIRCRAFT
    rng = np.random.default_rng(seed)
    family = random_polynomial_variations(rng, 2, n_variations, 0.0, a.T)
    zero = ForceSchedule.zero(2)
    init = bm.TangentVector([0.0, 0.0], [a.v0, 0.0])
    rows: list[ConvergenceRow] = []
    for dt in dts:
        traj = simulate_lagrangian(sys, zero, init, 0.0, a.T, dt)
        res = max(abs(principle_residual(sys, traj, zero, v)) for v in family)
        ratio = rows[-1].residual / res if rows and res > 0 else None
        rows.append(ConvergenceRow(dt, res, ratio))
    return rows


def run_variational(seed: int = SEED) -> tuple[list[ConvergenceRow], list[CheckResult]]:
    rows = variational_table(seed=seed)
    fine = variational_table(dts=(1e-3,), seed=seed)[0]
    results = [CheckResult(f"principle residual at dt={fine.dt:g}", fine.residual, 1e-8)]
    for row in rows[1:]:
        # distance of the halving ratio from the band [14, 18]
        off = 0.0 if 14.0 <= row.ratio <= 18.0 else min(abs(row.ratio - 14.0), abs(row.ratio - 18.0))
        results.append(CheckResult(f"halving ratio at dt={row.dt:g} ({row.ratio:.2f})", off, 0.0))
    return rows, results


def format_results(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'max residual':>12}  {'tolerance':>9}  status"]
    for r in results:
        lines.append(
            f"{r.name:<{width}}  {r.residual:12.3e}  {r.tolerance:9.1e}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)


def format_table(rows: list[ConvergenceRow]) -> str:
    lines = [f"{'dt':>10}  {'max residual':>12}  {'ratio':>7}"]
    for row in rows:
        ratio = "" if row.ratio is None else f"{row.ratio:7.2f}"
        lines.append(f"{row.dt:10.4g}  {row.residual:12.3e}  {ratio:>7}")
    return "\n".join(lines)


__all__ = [
    "CheckResult",
    "ConvergenceRow",
    "IDENTITY_CHECKS",
    "format_results",
    "format_table",
    "run_identities",
    "run_variational",
    "variational_table",
]
