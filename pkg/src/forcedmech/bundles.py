"""Coordinate charts of the iterated bundles and the canonical maps between them.

Every point is a plain record of coordinate m-vectors in one global chart.

Second tangent bundle convention: a :class:`TTPoint` ``(x, v, dx, dv)`` is
the tangent vector at ``s = 0`` of a curve ``s -> (X(s), V(s))`` in TM, with
``(x, v) = (X, V)(0)`` and ``(dx, dv) = (X', V')(0)``. Its base for the
vector bundle TTM -> TM is ``(x, v)``; its base for the tangent-lifted
structure TTM -> TM is ``(x, dx)``. :func:`pair_TT` pairs over the first,
:func:`tangent_pair` over the second, and :func:`kappa11` exchanges them.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np


class BaseMismatchError(ValueError):
    """Two arguments do not sit over the same base point."""


def _vec(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


class _Point:
    """Shared plumbing: coerce fields to read-only float vectors of equal length."""

    def __post_init__(self):
        dims = set()
        for f in fields(self):
            arr = _vec(getattr(self, f.name))
            object.__setattr__(self, f.name, arr)
            dims.add(arr.shape[0])
        if len(dims) != 1:
            raise ValueError(f"{type(self).__name__}: coordinate lengths differ {sorted(dims)}")

    @property
    def dim(self) -> int:
        return getattr(self, fields(self)[0].name).shape[0]

    def as_tuple(self) -> tuple[np.ndarray, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.as_tuple(), other.as_tuple()))

    def allclose(self, other, atol=0.0, rtol=0.0) -> bool:
        return all(
            np.allclose(a, b, atol=atol, rtol=rtol) for a, b in zip(self.as_tuple(), other.as_tuple())
        )

    @classmethod
    def zero(cls, m: int):
        return cls(*(np.zeros(m) for _ in fields(cls)))

    @classmethod
    def random(cls, rng: np.random.Generator, m: int, scale: float = 1.0):
        return cls(*(rng.uniform(-scale, scale, m) for _ in fields(cls)))


@dataclass(frozen=True, eq=False)
class TangentVector(_Point):
    x: np.ndarray
    v: np.ndarray


@dataclass(frozen=True, eq=False)
class Covector(_Point):
    x: np.ndarray
    p: np.ndarray


@dataclass(frozen=True, eq=False)
class SecondTangent(_Point):
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray


@dataclass(frozen=True, eq=False)
class TTPoint(_Point):
    x: np.ndarray
    v: np.ndarray
    dx: np.ndarray
    dv: np.ndarray


@dataclass(frozen=True, eq=False)
class TTStarPoint(_Point):
    x: np.ndarray
    p: np.ndarray
    v: np.ndarray
    pdot: np.ndarray


@dataclass(frozen=True, eq=False)
class TStarTPoint(_Point):
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True, eq=False)
class TStarTStarPoint(_Point):
    x: np.ndarray
    p: np.ndarray
    y: np.ndarray
    z: np.ndarray


@dataclass(frozen=True, eq=False)
class TT2Point(_Point):
    """(x, v, a, dx, dv, da): first-order variation of a second-order jet."""

    x: np.ndarray
    v: np.ndarray
    a: np.ndarray
    dx: np.ndarray
    dv: np.ndarray
    da: np.ndarray


@dataclass(frozen=True, eq=False)
class T2TPoint(_Point):
    """(x, v, dx, dv, ddx, ddv): second-order jet of a curve in TM."""

    x: np.ndarray
    v: np.ndarray
    dx: np.ndarray
    dv: np.ndarray
    ddx: np.ndarray
    ddv: np.ndarray


@dataclass(frozen=True, eq=False)
class ForceMomentumSample(_Point):
    """External force ``f`` and momentum ``p`` over one configuration ``x``."""

    x: np.ndarray
    f: np.ndarray
    p: np.ndarray


def _same(a, b, what):
    if not np.array_equal(a, b):
        raise BaseMismatchError(f"base points differ in {what}: {a} != {b}")


# ---------------------------------------------------------------------------
# canonical maps
# ---------------------------------------------------------------------------


def kappa11(w: TTPoint) -> TTPoint:
    """Canonical involution of TTM: exchange ``v`` and ``dx``."""
    return TTPoint(w.x, w.dx, w.v, w.dv)


def kappa12(w: TT2Point) -> T2TPoint:
    """TT^2 M -> T^2 T M coordinate exchange."""
    return T2TPoint(w.x, w.dx, w.v, w.dv, w.a, w.da)


def kappa21(w: T2TPoint) -> TT2Point:
    """T^2 T M -> TT^2 M, inverse of :func:`kappa12`."""
    return TT2Point(w.x, w.dx, w.ddx, w.v, w.dv, w.ddv)


def alpha(z: TTStarPoint) -> TStarTPoint:
    """TT*M -> T*TM: ``(x, p, v, pdot) -> (x, v, a=pdot, b=p)``."""
    return TStarTPoint(z.x, z.v, z.pdot, z.p)


def alpha_inv(s: TStarTPoint) -> TTStarPoint:
    return TTStarPoint(s.x, s.b, s.v, s.a)


def beta(z: TTStarPoint) -> TStarTStarPoint:
    """TT*M -> T*T*M: ``(x, p, v, pdot) -> (x, p, y=pdot, z=-v)``."""
    return TStarTStarPoint(z.x, z.p, z.pdot, -z.v)


def beta_inv(b: TStarTStarPoint) -> TTStarPoint:
    return TTStarPoint(b.x, b.p, -b.z, b.y)


def F11(w: TTPoint) -> TTPoint:
    return TTPoint(w.x, w.v, np.zeros_like(w.dx), w.dx)


def F21(w: TT2Point) -> TT2Point:
    """Vertical endomorphism F(2;1) of TT^2 M.

    Differentiating ``q(s t, t)`` twice in t at the origin doubles the
    top slot: ``(x, v, a, dx, dv, da) -> (x, v, a, 0, dx, 2 dv)``, which
    is what makes ``F21 o F21 = F22`` hold.
    """
    return TT2Point(w.x, w.v, w.a, np.zeros_like(w.dx), w.dx, 2.0 * w.dv)


def F22(w: TT2Point) -> TT2Point:
    zero = np.zeros_like(w.dx)
    return TT2Point(w.x, w.v, w.a, zero, zero, 2.0 * w.dx)


def tangent_lift_T1(s: SecondTangent) -> TTPoint:
    """T(1): T^2 M -> TTM, ``(x, v, a) -> (x, v, v, a)``."""
    return TTPoint(s.x, s.v, s.v, s.a)


def tau_TT2(w: TT2Point) -> TTPoint:
    """Tangent of the projection T^2 M -> TM: drop the acceleration slots."""
    return TTPoint(w.x, w.v, w.dx, w.dv)


def tau_T2T(w: T2TPoint) -> TTPoint:
    """Projection T^2 T M -> TTM: drop the second-order slots."""
    return TTPoint(w.x, w.v, w.dx, w.dv)


def mu(f: Covector, p: Covector) -> TTStarPoint:
    """Vertical lift of force ``f`` at momentum ``p``: ``(x, p, 0, f)``."""
    _same(f.x, p.x, "x")
    return TTStarPoint(p.x, p.p, np.zeros_like(p.p), f.p)


def chi(f: Covector, w: TTStarPoint) -> TTStarPoint:
    """Subtract the force from the ``pdot`` slot."""
    _same(f.x, w.x, "x")
    return TTStarPoint(w.x, w.p, w.v, w.pdot - f.p)


# ---------------------------------------------------------------------------
# pairings
# ---------------------------------------------------------------------------


def pair_T(f: Covector, v: TangentVector) -> float:
    _same(f.x, v.x, "x")
    return float(f.p @ v.v)


def pair_TT(z: TStarTPoint, w: TTPoint) -> float:
    """Canonical pairing T*TM x TTM over the base ``(x, v)``."""
    _same(z.x, w.x, "x")
    _same(z.v, w.v, "v")
    return float(z.a @ w.dx + z.b @ w.dv)


def tangent_pair(z: TTStarPoint, w: TTPoint) -> float:
    """Tangent pairing TT*M x TTM.

    ``w`` is read over its tangent-lifted base ``(x, dx)``: the ``v`` slot
    is the fibre variation, so the value is ``pdot . v + p . dv``. For a
    prolonged variation ``w = (xi, dxi, xi', dxi')`` this is
    ``d/dt <eta, dxi>``.
    """
    _same(z.x, w.x, "x")
    _same(z.v, w.dx, "v")
    return float(z.pdot @ w.v + z.p @ w.dv)


def pair_TsTs(b: TStarTStarPoint, z: TTStarPoint) -> float:
    _same(b.x, z.x, "x")
    _same(b.p, z.p, "p")
    return float(b.y @ z.v + b.z @ z.pdot)


# ---------------------------------------------------------------------------
# forms on TT*M
# ---------------------------------------------------------------------------


def liouville_theta(w: TTStarPoint) -> float:
    """Liouville form ``p dx`` of T*M evaluated on the tangent vector ``w``."""
    return float(w.p @ w.v)


def omega(dx1, dp1, dx2, dp2) -> float:
    """Canonical 2-form ``dp ^ dx`` on a pair of increments."""
    return float(np.dot(dp1, dx2) - np.dot(dx1, dp2))


def dT_theta(w: TTStarPoint, dx, dp, dxdot, dpdot) -> float:
    return float(w.pdot @ np.asarray(dx, float) + w.p @ np.asarray(dxdot, float))


def iT_omega(w: TTStarPoint, dx, dp, dxdot, dpdot) -> float:
    return float(w.pdot @ np.asarray(dx, float) - w.v @ np.asarray(dp, float))


def G_M(w: TTStarPoint) -> float:
    """``G_M = p . xdot``, the Liouville form contracted with the tangent vector."""
    return liouville_theta(w)
