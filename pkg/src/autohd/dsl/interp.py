"""Closure compiler and step-budgeted evaluator for the heuristic DSL.

Integers and rationals stay exact (``/`` on two exact operands yields a
``Fraction``); any float operand makes the result a float. Every failure is an
:class:`EvalFault` carrying one of ``type``, ``div_zero``, ``budget`` or
``collection_overflow``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .syntax import BinOp, Bind, Call, DSLError, If, Let, Neg, Num, Var

_MISSING = object()
_BIG = 4096  # bits; exact values beyond this degrade to float
_SMALL = 1 << 64  # operands below this cannot overflow _BIG in one step


class EvalFault(DSLError):
    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(message)


@dataclass(frozen=True)
class EvalLimits:
    step_budget: int = 100_000
    max_collection_size: int = 10_000

    def __post_init__(self):
        if self.step_budget <= 0 or self.max_collection_size <= 0:
            raise ValueError("evaluation limits must be positive")


class _Ctx:
    __slots__ = ("steps", "budget", "max_coll")

    def __init__(self, limits: EvalLimits):
        self.steps = 0
        self.budget = limits.step_budget
        self.max_coll = limits.max_collection_size

    def charge(self, n=1):
        self.steps += n
        if self.steps > self.budget:
            raise EvalFault("budget", f"step budget of {self.budget} exhausted")


_NUMERIC = frozenset((int, float, Fraction))


def is_number(x) -> bool:
    return type(x) in _NUMERIC or (isinstance(x, (int, float, Fraction)) and not isinstance(x, bool))


def _norm(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            x = x.numerator
        elif x.numerator.bit_length() > _BIG or x.denominator.bit_length() > _BIG:
            return _to_float(x)
        else:
            return x
    if isinstance(x, int) and x.bit_length() > _BIG:
        return _to_float(x)
    return x


def _to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def _num(x, what):
    if type(x) in _NUMERIC:
        return x
    if not is_number(x):
        raise EvalFault("type", f"{what} expects a number, got {_tname(x)}")
    return x


def _bool(x, what):
    if not isinstance(x, bool):
        raise EvalFault("type", f"{what} expects a boolean, got {_tname(x)}")
    return x


def _tname(x) -> str:
    if isinstance(x, bool):
        return "boolean"
    if is_number(x):
        return "number"
    if isinstance(x, tuple):
        return "list"
    if isinstance(x, str):
        return "name"
    return type(x).__name__


def _coll(x, what, ctx):
    if not isinstance(x, tuple):
        raise EvalFault("type", f"{what} expects a list, got {_tname(x)}")
    if len(x) > ctx.max_coll:
        raise EvalFault("collection_overflow", f"{what}: list of {len(x)} exceeds {ctx.max_coll}")
    return x


def _whole(x, what) -> int:
    x = _num(x, what)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise EvalFault("type", f"{what} expects a whole number")


def _arith(op, a, b):
    a = _num(a, op)
    b = _num(b, op)
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        else:
            if b == 0:
                raise EvalFault("div_zero", "division by zero")
            if isinstance(a, float) or isinstance(b, float):
                r = _to_float(a) / _to_float(b)
            else:
                r = Fraction(a) / Fraction(b)
    except OverflowError:
        return math.inf
    return _norm(r)


def _compare(op, a, b):
    if op == "==":
        return _equal(a, b)
    if op == "!=":
        return not _equal(a, b)
    a = _num(a, op)
    b = _num(b, op)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _equal(a, b):
    ta = type(a)
    if ta is type(b) and (ta is int or ta is str):
        return a == b
    if is_number(a) != is_number(b) or isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def _sum(args, ctx):
    xs = _coll(args[0], "sum", ctx)
    ctx.charge(len(xs))
    total = 0
    for x in xs:
        if type(total) is int and type(x) is int and -_SMALL < total < _SMALL and -_SMALL < x < _SMALL:
            total += x
        else:
            total = _arith("+", total, _num(x, "sum"))
    return total


def _count(args, ctx):
    xs = _coll(args[0], "count", ctx)
    ctx.charge(len(xs))
    return sum(1 for x in xs if _bool(x, "count"))


def _extreme(name, pick):
    def impl(args, ctx):
        if len(args) == 2:
            return pick(_num(args[0], name), _num(args[1], name))
        xs = _coll(args[0], name, ctx)
        if not xs:
            raise EvalFault("type", f"{name} of an empty list")
        ctx.charge(len(xs))
        for x in xs:
            _num(x, name)
        return pick(xs)

    return impl


def _zip(args, ctx):
    a = _coll(args[0], "zip", ctx)
    b = _coll(args[1], "zip", ctx)
    ctx.charge(min(len(a), len(b)))
    return tuple(zip(a, b))


def _range(args, ctx):
    n = _whole(args[0], "range")
    if n > ctx.max_coll:
        raise EvalFault("collection_overflow", f"range({n}) exceeds {ctx.max_coll}")
    ctx.charge(max(n, 0))
    return tuple(range(n))


def _at(args, ctx):
    xs = _coll(args[0], "at", ctx)
    i = _whole(args[1], "at")
    if not 0 <= i < len(xs):
        raise EvalFault("type", f"index {i} out of range for list of {len(xs)}")
    return xs[i]


CORE_IMPLS = {
    "sum": _sum,
    "count": _count,
    "min": _extreme("min", min),
    "max": _extreme("max", max),
    "len": lambda args, ctx: len(_coll(args[0], "len", ctx)),
    "abs": lambda args, ctx: abs(_num(args[0], "abs")),
    "zip": _zip,
    "range": _range,
    "not": lambda args, ctx: not _bool(args[0], "not"),
    "at": _at,
}


def _unknown(name):
    def impl(args, ctx):
        raise EvalFault("type", f"unknown function {name}")

    return impl


def compile_ast(node, accessors: dict):
    """Turn ``node`` into ``fn(env, ctx)``; ``accessors`` maps domain function names to callables."""

    def comp(n):
        if isinstance(n, Num):
            value = n.value

            def num(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                return value

            return num
        if isinstance(n, Var):
            name = n.name

            def var(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                try:
                    return env[name]
                except KeyError:
                    raise EvalFault("type", f"{name} is not available for this state") from None

            return var
        if isinstance(n, Neg):
            operand = comp(n.operand)

            def neg(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                return _norm(-_num(operand(env, ctx), "negation"))

            return neg
        if isinstance(n, BinOp):
            left, right, op = comp(n.left), comp(n.right), n.op
            if op == "and":

                def and_(env, ctx):
                    ctx.steps += 1
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    return _bool(left(env, ctx), "and") and _bool(right(env, ctx), "and")

                return and_
            if op == "or":

                def or_(env, ctx):
                    ctx.steps += 1
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    return _bool(left(env, ctx), "or") or _bool(right(env, ctx), "or")

                return or_
            if op in ("+", "-", "*"):
                fast = {"+": int.__add__, "-": int.__sub__, "*": int.__mul__}[op]

                def int_arith(env, ctx):
                    ctx.steps += 1
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    a, b = left(env, ctx), right(env, ctx)
                    if type(a) is int and type(b) is int and -_SMALL < a < _SMALL and -_SMALL < b < _SMALL:
                        return fast(a, b)
                    return _arith(op, a, b)

                return int_arith
            if op == "/":

                def arith(env, ctx):
                    ctx.steps += 1
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    return _arith(op, left(env, ctx), right(env, ctx))

                return arith

            if op in ("==", "!="):
                negate = op == "!="

                def eq(env, ctx):
                    ctx.steps += 1
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    return _equal(left(env, ctx), right(env, ctx)) is not negate

                return eq

            def cmp(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                return _compare(op, left(env, ctx), right(env, ctx))

            return cmp
        if isinstance(n, Let):
            name, bound, body = n.name, comp(n.bound), comp(n.body)

            def let(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                value = bound(env, ctx)
                saved = env.get(name, _MISSING)
                env[name] = value
                try:
                    return body(env, ctx)
                finally:
                    _restore(env, name, saved)

            return let
        if isinstance(n, If):
            cond, then, orelse = comp(n.cond), comp(n.then), comp(n.orelse)

            def ite(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                return then(env, ctx) if _bool(cond(env, ctx), "if") else orelse(env, ctx)

            return ite
        if isinstance(n, Bind):
            var, coll, body, is_map = n.var, comp(n.coll), comp(n.body), n.func == "map"

            def bind(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                xs = _coll(coll(env, ctx), n.func, ctx)
                saved = env.get(var, _MISSING)
                out = []
                try:
                    for x in xs:
                        env[var] = x
                        y = body(env, ctx)
                        if is_map:
                            out.append(y)
                        elif _bool(y, "filter"):
                            out.append(x)
                finally:
                    _restore(env, var, saved)
                return tuple(out)

            return bind
        if isinstance(n, Call):
            args = [comp(a) for a in n.args]
            name = n.func
            if name in accessors:
                impl = accessors[name]

                def access(env, ctx):
                    ctx.steps += 1
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    values = [a(env, ctx) for a in args]
                    try:
                        out = impl(*values)
                    except (TypeError, ValueError, OverflowError, ZeroDivisionError, AttributeError) as exc:
                        raise EvalFault("type", f"{name}: {exc}") from None
                    if out is None:
                        raise EvalFault("type", f"{name} does not apply to {', '.join(map(_tname, values))}")
                    if isinstance(out, tuple):
                        _coll(out, name, ctx)
                        ctx.charge(len(out))
                    return out

                return access

            if name == "at" and isinstance(n.args[1], Num) and type(n.args[1].value) is int:
                seq, index = args[0], n.args[1].value

                def at_const(env, ctx):
                    ctx.steps += 2
                    if ctx.steps > ctx.budget:
                        ctx.charge(0)
                    xs = _coll(seq(env, ctx), "at", ctx)
                    if not 0 <= index < len(xs):
                        raise EvalFault("type", f"index {index} out of range for list of {len(xs)}")
                    return xs[index]

                return at_const
            impl = CORE_IMPLS.get(name) or _unknown(name)

            def call(env, ctx):
                ctx.steps += 1
                if ctx.steps > ctx.budget:
                    ctx.charge(0)
                return impl([a(env, ctx) for a in args], ctx)

            return call
        raise TypeError(f"not an AST node: {n!r}")

    return comp(node)


def _restore(env, name, saved):
    if saved is _MISSING:
        env.pop(name, None)
    else:
        env[name] = saved


def run(fn, bindings: dict, limits: EvalLimits) -> float:
    """Evaluate a compiled program and coerce the result to an extended real."""
    ctx = _Ctx(limits)
    try:
        value = fn(dict(bindings), ctx)
    except RecursionError:
        raise EvalFault("budget", "evaluation nested too deeply") from None
    if not is_number(value):
        raise EvalFault("type", f"heuristic must produce a number, got {_tname(value)}")
    value = _to_float(value)
    if math.isnan(value):
        raise EvalFault("type", "heuristic produced NaN")
    if value < 0:
        raise EvalFault("type", f"heuristic produced a negative value {value}")
    return value
