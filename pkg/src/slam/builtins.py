"""Predefined operations shared by the logic engine, the direct evaluator and
the skeleton interpreter.

Every operation maps ground values to a ground value.  Two failure modes are
distinguished: `BuiltinFail` is a normal no-answer (the engine backtracks over
it, the way a partial predicate fails), while `EvalError` is a hard domain
error (wrong operand kind, division by zero) that aborts the query.
"""

from __future__ import annotations

import math

from .ast import (
    FALSE, RANGE_QTAG, TRUE, VBool, VCon, VInt, VReal, VRec, VSeq, VStr,
    Value, mk_range, pretty_value,
)


class EvalError(Exception):
    """Domain error during evaluation; carries a stable error code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class BuiltinFail(Exception):
    """Normal failure of a partial operation (no answer, not an error)."""


# Comparison tolerance for reals: exact equality is useless for computed
# postconditions, so `=` on reals is satisfied within this relative bound.
REL_TOL = 1e-9


def _num(v: Value, op: str) -> int | float:
    if isinstance(v, VInt):
        return v.v
    if isinstance(v, VReal):
        return v.v
    raise EvalError("TYPE", f"{op} expects a number, got {pretty_value(v)}")


def _wrap_num(x: int | float) -> Value:
    return VInt(x) if isinstance(x, int) else VReal(x)


def _bool(v: Value, op: str) -> bool:
    if isinstance(v, VBool):
        return v.v
    raise EvalError("TYPE", f"{op} expects a boolean, got {pretty_value(v)}")


def reals_close(a: float, b: float) -> bool:
    return abs(a - b) <= REL_TOL * max(1.0, abs(a), abs(b))


def values_equal(a: Value, b: Value) -> bool:
    """Equality as used by the `=` operation: structural, with tolerant
    comparison whenever both sides are numeric and either is real."""
    if isinstance(a, (VInt, VReal)) and isinstance(b, (VInt, VReal)):
        if isinstance(a, VInt) and isinstance(b, VInt):
            return a.v == b.v
        return reals_close(float(a.v), float(b.v))
    if isinstance(a, VSeq) and isinstance(b, VSeq):
        return len(a.items) == len(b.items) and all(
            values_equal(x, y) for x, y in zip(a.items, b.items))
    if isinstance(a, VRec) and isinstance(b, VRec):
        return a.labels() == b.labels() and all(
            values_equal(x, y) for (_, x), (_, y) in zip(a.fields, b.fields))
    if isinstance(a, VCon) and isinstance(b, VCon):
        return a.tag == b.tag and len(a.args) == len(b.args) and all(
            values_equal(x, y) for x, y in zip(a.args, b.args))
    return a == b


def _cmp_pair(a: Value, b: Value, op: str) -> tuple:
    if isinstance(a, (VInt, VReal)) and isinstance(b, (VInt, VReal)):
        return (float(a.v), float(b.v))
    if isinstance(a, VStr) and isinstance(b, VStr):
        return (a.v, b.v)
    raise EvalError("TYPE", f"{op} expects two numbers or two strings")


def value_less(a: Value, b: Value) -> bool:
    x, y = _cmp_pair(a, b, "ordering")
    return x < y


def _add(args):
    x, y = _num(args[0], "+"), _num(args[1], "+")
    return _wrap_num(x + y)


def _sub(args):
    x, y = _num(args[0], "-"), _num(args[1], "-")
    return _wrap_num(x - y)


def _mul(args):
    x, y = _num(args[0], "*"), _num(args[1], "*")
    return _wrap_num(x * y)


def _div(args):
    x, y = _num(args[0], "/"), _num(args[1], "/")
    if y == 0:
        raise EvalError("DIV_BY_ZERO", "division by zero")
    return VReal(x / y)


def _neg(args):
    x = _num(args[0], "unary -")
    return _wrap_num(-x)


def _eq(args):
    return VBool(values_equal(args[0], args[1]))


def _ne(args):
    return VBool(not values_equal(args[0], args[1]))


def _lt(args):
    x, y = _cmp_pair(args[0], args[1], "<")
    return VBool(x < y)


def _le(args):
    x, y = _cmp_pair(args[0], args[1], "<=")
    return VBool(x <= y)


def _gt(args):
    x, y = _cmp_pair(args[0], args[1], ">")
    return VBool(x > y)


def _ge(args):
    x, y = _cmp_pair(args[0], args[1], ">=")
    return VBool(x >= y)


# Logical operations are strict functions over booleans: false is a valid
# computed result, so they cannot be mapped onto clause conjunction.

def _and(args):
    return VBool(_bool(args[0], "and") and _bool(args[1], "and"))


def _or(args):
    return VBool(_bool(args[0], "or") or _bool(args[1], "or"))


def _not(args):
    return VBool(not _bool(args[0], "not"))


def _implies(args):
    return VBool((not _bool(args[0], "implies")) or _bool(args[1], "implies"))


def _iff(args):
    return VBool(_bool(args[0], "iff") == _bool(args[1], "iff"))


def _length(args):
    v = args[0]
    if isinstance(v, VSeq):
        return VInt(len(v.items))
    if isinstance(v, VStr):
        return VInt(len(v.v))
    if isinstance(v, VCon) and v.tag == RANGE_QTAG:
        lo, hi = v.args[0].v, v.args[1].v
        return VInt(max(0, hi - lo + 1))
    raise EvalError("TYPE", f"length expects a sequence, got {pretty_value(v)}")


def _nth(args):
    """1-based indexing; out-of-range is a failure, not an error, so that a
    length-mismatch postcondition fails instead of aborting."""
    v, i = args
    if not isinstance(i, VInt):
        raise EvalError("TYPE", "index must be an integer")
    if isinstance(v, VSeq):
        if 1 <= i.v <= len(v.items):
            return v.items[i.v - 1]
        raise BuiltinFail()
    if isinstance(v, VStr):
        if 1 <= i.v <= len(v.v):
            return VStr(v.v[i.v - 1])
        raise BuiltinFail()
    raise EvalError("TYPE", f"cannot index {pretty_value(v)}")


def _sqrt(args):
    x = _num(args[0], "sqrt")
    if x < 0:
        raise EvalError("DOMAIN", "sqrt of a negative number")
    return VReal(math.sqrt(x))


def _sqr(args):
    x = _num(args[0], "sqr")
    return _wrap_num(x * x)


def _abs(args):
    x = _num(args[0], "abs")
    return _wrap_num(abs(x))


def _append(args):
    s, x = args
    if not isinstance(s, VSeq):
        raise EvalError("TYPE", "append expects a sequence")
    return VSeq(s.items + (x,))


def _concat(args):
    a, b = args
    if isinstance(a, VSeq) and isinstance(b, VSeq):
        return VSeq(a.items + b.items)
    if isinstance(a, VStr) and isinstance(b, VStr):
        return VStr(a.v + b.v)
    raise EvalError("TYPE", "concat expects two sequences or two strings")


def _mkseq(args):
    return VSeq(tuple(args))


def _mkrange(args):
    lo, hi = args
    if not isinstance(lo, VInt) or not isinstance(hi, VInt):
        raise EvalError("TYPE", "range bounds must be integers")
    return mk_range(lo.v, hi.v)


def _str_first(args):
    v = args[0]
    if isinstance(v, VStr) and v.v:
        return VStr(v.v[0])
    raise BuiltinFail()


def _str_rest(args):
    v = args[0]
    if isinstance(v, VStr) and v.v:
        return VStr(v.v[1:])
    raise BuiltinFail()


def get_field(v: Value, label: str) -> Value:
    """Record field access.  A constructor value wrapping a single record is
    unwrapped transparently, which is how labeled class attributes are read."""
    if isinstance(v, VCon) and len(v.args) == 1 and isinstance(v.args[0], VRec):
        v = v.args[0]
    if isinstance(v, VRec):
        got = v.get(label)
        if got is None:
            raise EvalError("NO_FIELD", f"no field {label!r} in {pretty_value(v)}")
        return got
    raise EvalError("TYPE", f"cannot read field {label!r} of {pretty_value(v)}")


TABLE = {
    "add": _add, "sub": _sub, "mul": _mul, "div": _div, "neg": _neg,
    "eq": _eq, "ne": _ne, "lt": _lt, "le": _le, "gt": _gt, "ge": _ge,
    "and": _and, "or": _or, "not": _not, "implies": _implies, "iff": _iff,
    "length": _length, "nth": _nth,
    "sqrt": _sqrt, "sqr": _sqr, "abs": _abs,
    "append": _append, "concat": _concat,
    "mkseq": _mkseq, "mkrange": _mkrange,
    "str_first": _str_first, "str_rest": _str_rest,
}

# Functions callable by name from specification text.
CALLABLE = {"length", "sqrt", "sqr", "abs", "append", "concat"}

INFIX_OPS = {
    "+": "add", "-": "sub", "*": "mul", "/": "div",
    "=": "eq", "!=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge",
}

BOOL_RESULT = {"eq", "ne", "lt", "le", "gt", "ge",
               "and", "or", "not", "implies", "iff"}


def apply_op(op: str, args: list[Value]) -> Value:
    """Apply a (possibly parameterized) builtin.  Parameterized forms carry
    their static payload after a colon: mkcon:<tag>, mkrec:<l1,l2>,
    getfield:<label>."""
    if op.startswith("mkcon:"):
        return VCon(op[6:], tuple(args))
    if op.startswith("mkrec:"):
        labels = op[6:].split(",") if op[6:] else []
        if len(labels) != len(args):
            raise EvalError("ARITY", "record construction arity mismatch")
        return VRec(tuple(zip(labels, args)))
    if op.startswith("getfield:"):
        return get_field(args[0], op[9:])
    fn = TABLE.get(op)
    if fn is None:
        raise EvalError("NO_BUILTIN", f"unknown operation {op!r}")
    return fn(args)
