"""Second-order hyper-dual numbers.

A :class:`HyperDual2` ``a + b1*e1 + b2*e2 + b12*e1*e2`` with
``e1**2 = e2**2 = 0`` carries a value, two directional first derivatives
and their mixed second derivative. Seeding ``e1`` along direction u and
``e2`` along direction w turns any smooth f into
``f + (Df.u) e1 + (Df.w) e2 + (D2f(u, w)) e1 e2`` with no truncation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .expressions import DomainError


@dataclass(frozen=True, slots=True)
class HyperDual2:
    val: float
    d1: float = 0.0
    d2: float = 0.0
    d12: float = 0.0

    @staticmethod
    def lift(other) -> "HyperDual2":
        if isinstance(other, HyperDual2):
            return other
        return HyperDual2(float(other))

    def chain(self, f0: float, f1: float, f2: float) -> "HyperDual2":
        """Apply a scalar function given its value and first two derivatives."""
        return HyperDual2(
            f0,
            f1 * self.d1,
            f1 * self.d2,
            f1 * self.d12 + f2 * self.d1 * self.d2,
        )

    def __add__(self, other):
        o = HyperDual2.lift(other)
        return HyperDual2(self.val + o.val, self.d1 + o.d1, self.d2 + o.d2, self.d12 + o.d12)

    __radd__ = __add__

    def __sub__(self, other):
        o = HyperDual2.lift(other)
        return HyperDual2(self.val - o.val, self.d1 - o.d1, self.d2 - o.d2, self.d12 - o.d12)

    def __rsub__(self, other):
        return HyperDual2.lift(other) - self

    def __neg__(self):
        return HyperDual2(-self.val, -self.d1, -self.d2, -self.d12)

    def __mul__(self, other):
        o = HyperDual2.lift(other)
        return HyperDual2(
            self.val * o.val,
            self.val * o.d1 + self.d1 * o.val,
            self.val * o.d2 + self.d2 * o.val,
            self.val * o.d12 + self.d1 * o.d2 + self.d2 * o.d1 + self.d12 * o.val,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = HyperDual2.lift(other)
        if o.val == 0.0:
            raise ZeroDivisionError("hyper-dual division by zero")
        q = self.val / o.val
        q1 = (self.d1 - q * o.d1) / o.val
        q2 = (self.d2 - q * o.d2) / o.val
        q12 = (self.d12 - q1 * o.d2 - q2 * o.d1 - q * o.d12) / o.val
        return HyperDual2(q, q1, q2, q12)

    def __rtruediv__(self, other):
        return HyperDual2.lift(other) / self

    def __pow__(self, n):
        return self.chain(*power_coeffs(self.val, float(n), "^"))


# Value and first two derivatives of the elementary functions. Each raises
# DomainError outside the function's (differentiable) domain.


def power_coeffs(a: float, n: float, where: str):
    if n == 0.0:
        return 1.0, 0.0, 0.0
    if n == 1.0:
        return a, 1.0, 0.0
    if n == 2.0:
        return a * a, 2.0 * a, 2.0
    integral = n == int(n)
    if not integral and a < 0.0:
        raise DomainError("non-integer power of a negative number", where)
    if a == 0.0 and n < 2.0:
        raise DomainError("power not twice differentiable at zero", where)
    return a**n, n * a ** (n - 1.0), n * (n - 1.0) * a ** (n - 2.0)


def _sin(a, where):
    s = math.sin(a)
    return s, math.cos(a), -s


def _cos(a, where):
    c = math.cos(a)
    return c, -math.sin(a), -c


def _exp(a, where):
    e = math.exp(a)
    return e, e, e


def _ln(a, where):
    if a <= 0.0:
        raise DomainError("logarithm of a non-positive number", where)
    return math.log(a), 1.0 / a, -1.0 / (a * a)


def _sqrt(a, where):
    if a <= 0.0:
        if a < 0.0:
            raise DomainError("square root of a negative number", where)
        raise DomainError("square root not differentiable at zero", where)
    r = math.sqrt(a)
    return r, 0.5 / r, -0.25 / (r * a)


FUNCTION_COEFFS = {"sin": _sin, "cos": _cos, "exp": _exp, "ln": _ln, "sqrt": _sqrt}


def function_value(name: str, a: float, where: str) -> float:
    """Plain value of an elementary function, with the same domain guards."""
    if name == "ln" and a <= 0.0:
        raise DomainError("logarithm of a non-positive number", where)
    if name == "sqrt":
        if a < 0.0:
            raise DomainError("square root of a negative number", where)
        return math.sqrt(a)
    return {"sin": math.sin, "cos": math.cos, "exp": math.exp, "ln": math.log}[name](a)


def hd_function(name: str, u: HyperDual2, where: str = "") -> HyperDual2:
    return u.chain(*FUNCTION_COEFFS[name](u.val, where or name))
