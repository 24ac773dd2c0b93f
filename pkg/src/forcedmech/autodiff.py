"""Exact values, gradients and Hessians of expressions by hyper-dual seeding.

Two evaluators share the same arithmetic:

* :func:`evaluate_hyperdual` walks the tree with :class:`HyperDual2`
  objects. It is the readable reference.
* :func:`derivatives` compiles the tree once per set of seeding passes
  into straight-line Python. Each pass seeds ``e1`` along one coordinate
  and ``e2`` along another and carries the hyper-dual components through
  every node; components that are identically zero for a pass (the node
  does not depend on the seeded coordinate) are dropped at compile time.
  Plain values are shared between passes since they do not depend on the
  seeding.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .expressions import (
    BinOp,
    DomainError,
    Expression,
    Func,
    Neg,
    Node,
    Num,
    Param,
    Pow,
    Var,
    to_text,
    variables_of,
)
from .hyperdual import FUNCTION_COEFFS, HyperDual2, function_value, hd_function, power_coeffs

Pass = tuple[Var, Var]


class MissingParameterError(KeyError):
    pass


@dataclass(frozen=True)
class EvalPoint:
    x: Sequence[float] = ()
    v: Sequence[float] = ()
    t: float = 0.0
    params: Mapping[str, float] = field(default_factory=dict)
    p: Sequence[float] = ()


def power_value(a: float, n: float, where: str) -> float:
    if n != int(n) and a < 0.0:
        raise DomainError("non-integer power of a negative number", where)
    if a == 0.0 and n < 0.0:
        raise DomainError("negative power of zero", where)
    return a**n


# ---------------------------------------------------------------------------
# reference evaluator
# ---------------------------------------------------------------------------


def _slot(pt: EvalPoint, var: Var) -> float:
    if var.kind == "t":
        return pt.t
    return float(getattr(pt, var.kind)[var.index])


def evaluate_hyperdual(
    e: Expression, pt: EvalPoint, seeds: Mapping[Var, HyperDual2] | None = None
) -> HyperDual2:
    """Evaluate ``e`` over hyper-dual numbers.

    ``seeds`` maps variables to their lifted values; unseeded variables
    are lifted as constants.
    """
    seeds = seeds or {}

    def ev(node: Node) -> HyperDual2:
        if isinstance(node, Num):
            return HyperDual2(node.value)
        if isinstance(node, Param):
            try:
                return HyperDual2(float(pt.params[node.name]))
            except KeyError:
                raise MissingParameterError(node.name) from None
        if isinstance(node, Var):
            if node in seeds:
                return seeds[node]
            return HyperDual2(_slot(pt, node))
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, BinOp):
            a, b = ev(node.left), ev(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if b.val == 0.0:
                raise DomainError("division by zero", to_text(node))
            return a / b
        if isinstance(node, Pow):
            n = ev(node.exponent).val
            base = ev(node.base)
            return base.chain(*power_coeffs(base.val, n, to_text(node)))
        if isinstance(node, Func):
            return hd_function(node.name, ev(node.arg), to_text(node))
        raise TypeError(node)

    return ev(e.root)


# ---------------------------------------------------------------------------
# compiler
# ---------------------------------------------------------------------------


def _sum(*terms):
    live = [t for t in terms if t is not None]
    if not live:
        return None
    return " + ".join(f"({t})" for t in live)


def _prod(*factors):
    if any(f is None for f in factors):
        return None
    live = [f for f in factors if f != "1.0"]
    if not live:
        return "1.0"
    return " * ".join(f"({f})" for f in live)


class _Codegen:
    def __init__(self, passes: Sequence[Pass]):
        self.passes = list(passes)
        self.lines: list[str] = []
        self.prelude: list[str] = []
        self.loaded: dict = {}
        self.n = 0
        self.texts: list[str] = []

    def fresh(self) -> int:
        self.n += 1
        return self.n

    def text_const(self, node: Node) -> str:
        self.texts.append(to_text(node))
        return f"_T[{len(self.texts) - 1}]"

    def load(self, key, code) -> str:
        if key not in self.loaded:
            name = f"_l{len(self.loaded)}"
            self.loaded[key] = name
            self.prelude.append(f"{name} = {code}")
        return self.loaded[key]

    def assign(self, expr):
        if expr is None:
            return None
        if _ATOMIC.fullmatch(expr):
            return expr
        k = self.fresh()
        self.lines.append(f"_c{k} = {expr}")
        return f"_c{k}"

    def channels(self, make):
        """Emit channel assignments; ``make(j)`` returns (d1, d2, d12) code."""
        out = []
        for j in range(len(self.passes)):
            d1, d2, d12 = make(j)
            out.append((self.assign(d1), self.assign(d2), self.assign(d12)))
        return out

    def emit(self, node: Node):
        """Return (value code, [(d1, d2, d12) per pass]) with None for zero."""
        npass = len(self.passes)
        zero = [(None, None, None)] * npass
        if isinstance(node, Num):
            return repr(node.value), zero
        if isinstance(node, Param):
            return self.load(("param", node.name), f"prm[{node.name!r}]"), zero
        if isinstance(node, Var):
            if node.kind == "t":
                val = "t"
            else:
                val = self.load(node, f"{node.kind}[{node.index}]")
            chans = [
                ("1.0" if u == node else None, "1.0" if w == node else None, None)
                for (u, w) in self.passes
            ]
            return val, chans
        if isinstance(node, Neg):
            a, ch = self.emit(node.arg)
            val = self.assign(f"-{a}")
            return val, self.channels(
                lambda j: tuple(None if c is None else f"-{c}" for c in ch[j])
            )
        if isinstance(node, BinOp):
            return self.emit_binop(node)
        if isinstance(node, (Pow, Func)):
            return self.emit_unary(node)
        raise TypeError(node)

    def emit_binop(self, node: BinOp):
        a, left = self.emit(node.left)
        c, right = self.emit(node.right)
        op = node.op
        if op in "+-":
            val = self.assign(f"{a} {op} {c}")

            def make(j):
                out = []
                for lc, rc in zip(left[j], right[j]):
                    if rc is None:
                        out.append(lc)
                    elif lc is None:
                        out.append(rc if op == "+" else f"-{rc}")
                    else:
                        out.append(f"{lc} {op} {rc}")
                return tuple(out)

            return val, self.channels(make)
        if op == "*":
            val = self.assign(f"{a} * {c}")

            def make(j):
                b1, b2, b12 = left[j]
                d1, d2, d12 = right[j]
                return (
                    _sum(_prod(a, d1), _prod(b1, c)),
                    _sum(_prod(a, d2), _prod(b2, c)),
                    _sum(_prod(a, d12), _prod(b1, d2), _prod(b2, d1), _prod(b12, c)),
                )

            return val, self.channels(make)
        # division: q = a / c; a = q c differentiated gives the channels
        where = self.text_const(node)
        self.lines.append(f"if {c} == 0.0: raise DomainError('division by zero', {where})")
        q = self.assign(f"{a} / {c}")
        out = []
        for j in range(len(self.passes)):
            b1, b2, b12 = left[j]
            d1, d2, d12 = right[j]
            q1 = self.assign(None if (b1 is None and d1 is None) else f"({_sum(b1, _neg(_prod(q, d1)))}) / {c}")
            q2 = self.assign(None if (b2 is None and d2 is None) else f"({_sum(b2, _neg(_prod(q, d2)))}) / {c}")
            num = _sum(b12, _neg(_prod(q1, d2)), _neg(_prod(q2, d1)), _neg(_prod(q, d12)))
            q12 = self.assign(None if num is None else f"({num}) / {c}")
            out.append((q1, q2, q12))
        return q, out

    def emit_unary(self, node):
        where = self.text_const(node)
        if isinstance(node, Pow):
            a, ch = self.emit(node.base)
            n = self.emit_constant(node.exponent)
            coeffs = f"_pc({a}, {n}, {where})"
            value = f"_pv({a}, {n}, {where})"
        else:
            a, ch = self.emit(node.arg)
            coeffs = f"_FC[{node.name!r}]({a}, {where})"
            value = f"_fv({node.name!r}, {a}, {where})"
        if all(c == (None, None, None) for c in ch):
            return self.assign(value), ch
        k = self.fresh()
        f0, f1, f2 = f"_f{k}_0", f"_f{k}_1", f"_f{k}_2"
        self.lines.append(f"{f0}, {f1}, {f2} = {coeffs}")

        def make(j):
            b1, b2, b12 = ch[j]
            return (
                _prod(f1, b1),
                _prod(f1, b2),
                _sum(_prod(f1, b12), _prod(f2, b1, b2)),
            )

        return f0, self.channels(make)

    def emit_constant(self, node: Node) -> str:
        saved = self.passes
        self.passes = []
        try:
            val, _ = self.emit(node)
        finally:
            self.passes = saved
        return val


_ATOMIC = re.compile(r"\(*(_[A-Za-z0-9_]+|\d+\.\d*|t)\)*")


def _neg(code):
    return None if code is None else f"-({code})"


def compile_passes(root: Node, passes: Sequence[Pass]):
    """Compile ``root`` into ``f(x, v, p, t, prm) -> (val, d1, d2, d12, ...)``."""
    gen = _Codegen(passes)
    val, chans = gen.emit(root)
    outs = [val]
    for ch in chans:
        outs.extend(c if c is not None else "0.0" for c in ch)
    src = ["def _compiled(x, v, p, t, prm):"]
    if gen.prelude:
        src.append("    try:")
        src.extend(f"        {line}" for line in gen.prelude)
        src.append("    except KeyError as exc:")
        src.append("        raise MissingParameterError(exc.args[0]) from None")
    src.extend(f"    {line}" for line in gen.lines)
    src.append(f"    return ({', '.join(outs)},)")
    namespace = {
        "_FC": FUNCTION_COEFFS,
        "_fv": function_value,
        "_pc": power_coeffs,
        "_pv": power_value,
        "_T": tuple(gen.texts),
        "DomainError": DomainError,
        "MissingParameterError": MissingParameterError,
        "math": math,
    }
    code = "\n".join(src)
    exec(compile(code, "<expression>", "exec"), namespace)
    fn = namespace["_compiled"]
    fn.source = code
    return fn


def compiled(e: Expression, passes: Sequence[Pass] = ()):
    key = tuple(passes)
    fn = e._cache.get(key)
    if fn is None:
        fn = compile_passes(e.root, key)
        e._cache[key] = fn
    return fn


# ---------------------------------------------------------------------------
# public evaluation API
# ---------------------------------------------------------------------------


def evaluate(e: Expression, pt: EvalPoint) -> float:
    return compiled(e)(pt.x, pt.v, pt.p, pt.t, pt.params)[0]


def derivatives(e: Expression, pt: EvalPoint, passes: Sequence[Pass]):
    """Value and ``(d1, d2, d12)`` for every seeding pass."""
    out = compiled(e, passes)(pt.x, pt.v, pt.p, pt.t, pt.params)
    return out[0], [out[1 + 3 * j : 4 + 3 * j] for j in range(len(passes))]


def gradient(e: Expression, pt: EvalPoint, kind: str) -> np.ndarray:
    vars_ = [Var(kind, i) for i in range(e.dim)]
    _, chans = derivatives(e, pt, [(u, u) for u in vars_])
    return np.array([c[0] for c in chans])


def hessian(e: Expression, pt: EvalPoint, row_kind: str, col_kind: str) -> np.ndarray:
    """Matrix of second partials d2 e / d row_i d col_j."""
    m = e.dim
    if row_kind == col_kind:
        passes = [(Var(row_kind, i), Var(col_kind, j)) for i in range(m) for j in range(i, m)]
    else:
        passes = [(Var(row_kind, i), Var(col_kind, j)) for i in range(m) for j in range(m)]
    _, chans = derivatives(e, pt, passes)
    out = np.zeros((m, m))
    for (u, w), (_, _, d12) in zip(passes, chans):
        out[u.index, w.index] = d12
        if row_kind == col_kind:
            out[w.index, u.index] = d12
    return out


def grad_x(e: Expression, pt: EvalPoint) -> np.ndarray:
    return gradient(e, pt, "x")


def grad_v(e: Expression, pt: EvalPoint) -> np.ndarray:
    return gradient(e, pt, "v")


def grad_p(e: Expression, pt: EvalPoint) -> np.ndarray:
    return gradient(e, pt, "p")


def hessian_vv(e: Expression, pt: EvalPoint) -> np.ndarray:
    return hessian(e, pt, "v", "v")


def hessian_vx(e: Expression, pt: EvalPoint) -> np.ndarray:
    """``H[k, l] = d2 e / dv_k dx_l``."""
    return hessian(e, pt, "v", "x")


_T = Var("t", 0)
_TIME_PASS = ((_T, _T),)


def time_jet(e: Expression, t: float, params: Mapping[str, float]) -> tuple[float, float, float]:
    """Value, first and second time derivative of an expression in ``t``."""
    out = compiled(e, _TIME_PASS)((), (), (), t, params)
    return out[0], out[1], out[3]


# ---------------------------------------------------------------------------
# Lagrangian jets
# ---------------------------------------------------------------------------


def lagrangian_passes(m: int) -> tuple[Pass, ...]:
    """Seeding passes yielding dL/dx, dL/dv, d2L/dv dv and d2L/dv dx."""
    vv = [(Var("v", i), Var("v", j)) for i in range(m) for j in range(i, m)]
    vx = [(Var("v", i), Var("x", j)) for i, j in itertools.product(range(m), range(m))]
    return tuple(vv + vx)


class LagrangianJet:
    """Second-order data of L at one (x, v), computed in one compiled call."""

    __slots__ = ("value", "gx", "gv", "hvv", "hvx")

    def __init__(self, e: Expression, x, v, params):
        jet_function(e)(self, x, v, params)


def _jet_layout(m: int):
    """Output indices of gv, gx, hvv and hvx in the compiled jet tuple."""
    gv = [0] * m
    hvv = [[0] * m for _ in range(m)]
    k = 1
    for i in range(m):
        for j in range(i, m):
            if i == j:
                gv[i] = k
            hvv[i][j] = hvv[j][i] = k + 2
            k += 3
    gx = [0] * m
    hvx = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i == 0:
                gx[j] = k + 1
            hvx[i][j] = k + 2
            k += 3
    return gv, gx, hvv, hvx


def jet_function(e: Expression):
    """Cached filler ``fill(jet, x, v, params)`` for :class:`LagrangianJet`."""
    fill = e._cache.get("jet")
    if fill is not None:
        return fill
    fn = compiled(e, lagrangian_passes(e.dim))
    gv_i, gx_i, hvv_i, hvx_i = _jet_layout(e.dim)

    def fill(jet, x, v, params):
        out = fn(x, v, (), 0.0, params)
        jet.value = out[0]
        jet.gv = [out[k] for k in gv_i]
        jet.gx = [out[k] for k in gx_i]
        jet.hvv = [[out[k] for k in row] for row in hvv_i]
        jet.hvx = [[out[k] for k in row] for row in hvx_i]

    e._cache["jet"] = fill
    return fill
