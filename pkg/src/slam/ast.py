"""Syntax tree and runtime values for the specification language.

Everything here is an immutable dataclass.  Class definitions, patterns and
expressions are produced by the parser; values are the ground terms shared by
the logic engine, the direct evaluator, the serializer and the skeleton
interpreter.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def span_field():
    """Spans locate nodes for diagnostics but never affect equality."""
    return field(default=NO_SPAN, compare=False)


# --------------------------------------------------------------------------
# Source plumbing
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int       # 1-based
    column: int     # 1-based
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NO_SPAN = SourceSpan("<builtin>", 1, 1, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str   # "error" | "warning"
    span: SourceSpan
    message: str
    code: str

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message} [{self.code}]"


def error(span: SourceSpan, message: str, code: str) -> Diagnostic:
    return Diagnostic("error", span, message, code)


def warning(span: SourceSpan, message: str, code: str) -> Diagnostic:
    return Diagnostic("warning", span, message, code)


def has_errors(diags) -> bool:
    return any(d.severity == "error" for d in diags)


# --------------------------------------------------------------------------
# Runtime values
# --------------------------------------------------------------------------

class Value:
    """Immutable ground datum.  Equality is structural and total."""

    __slots__ = ()


@dataclass(frozen=True)
class VInt(Value):
    v: int


@dataclass(frozen=True)
class VReal(Value):
    v: float


@dataclass(frozen=True)
class VBool(Value):
    v: bool


@dataclass(frozen=True)
class VStr(Value):
    v: str


@dataclass(frozen=True)
class VSeq(Value):
    items: tuple[Value, ...]


@dataclass(frozen=True)
class VRec(Value):
    """Record value.  Field order is part of the value: records built through
    a class constructor are normalized to the declared label order, so values
    of the same class always compare structurally."""

    fields: tuple[tuple[str, Value], ...]

    def get(self, label: str) -> Value | None:
        for name, val in self.fields:
            if name == label:
                return val
        return None

    def labels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.fields)


@dataclass(frozen=True)
class VCon(Value):
    """Constructor-tagged tuple; the tag is a class-qualified name."""

    tag: str
    args: tuple[Value, ...]


# The range class is predefined: `lo .. hi` evaluates to a constructor value
# with this reserved tag so that ranges serialize and unify like any object.
RANGE_CLASS = "Range"
RANGE_TAG = ".."
RANGE_QTAG = RANGE_CLASS + RANGE_TAG

TRUE = VBool(True)
FALSE = VBool(False)


def mk_range(lo: int, hi: int) -> VCon:
    return VCon(RANGE_QTAG, (VInt(lo), VInt(hi)))


def is_range(v: Value) -> bool:
    return isinstance(v, VCon) and v.tag == RANGE_QTAG


def value_kind(v: Value) -> str:
    match v:
        case VInt():
            return "int"
        case VReal():
            return "real"
        case VBool():
            return "bool"
        case VStr():
            return "str"
        case VSeq():
            return "seq"
        case VRec():
            return "rec"
        case VCon():
            return "con"
    raise TypeError(f"not a value: {v!r}")


def format_real(x: float) -> str:
    """Shortest decimal that round-trips to the same binary64 value."""
    s = repr(x)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def pretty_value(v: Value) -> str:
    match v:
        case VInt(n):
            return str(n)
        case VReal(x):
            return format_real(x)
        case VBool(b):
            return "true" if b else "false"
        case VStr(s):
            return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
        case VSeq(items):
            return "[" + ", ".join(pretty_value(i) for i in items) + "]"
        case VRec(fields):
            inner = ", ".join(f"{n}: {pretty_value(x)}" for n, x in fields)
            return "{" + inner + "}"
        case VCon(tag, args) if tag == RANGE_QTAG:
            return f"({pretty_value(args[0])} .. {pretty_value(args[1])})"
        case VCon(tag, args):
            if not args:
                return tag
            return tag + "(" + ", ".join(pretty_value(a) for a in args) + ")"
    raise TypeError(f"not a value: {v!r}")


# --------------------------------------------------------------------------
# Type expressions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeName:
    name: str
    args: tuple[TypeName | RecordType, ...] = ()


@dataclass(frozen=True)
class RecordType:
    fields: tuple[tuple[str, TypeName | RecordType], ...]


TypeExpr = TypeName | RecordType

T_INT = TypeName("Int")
T_REAL = TypeName("Real")
T_BOOL = TypeName("Bool")
T_STRING = TypeName("String")
T_RANGE = TypeName(RANGE_CLASS)

PRIMITIVE_TYPES = {"Int", "Real", "Bool", "String"}


def seq_of(t: TypeExpr) -> TypeName:
    return TypeName("Seq", (t,))


# --------------------------------------------------------------------------
# Patterns
# --------------------------------------------------------------------------

class Pattern:
    __slots__ = ()


@dataclass(frozen=True)
class PVar(Pattern):
    name: str
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class PLit(Pattern):
    value: Value
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class PCon(Pattern):
    tag: str                      # source tag; qualified during analysis
    args: tuple[Pattern, ...]
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class PRec(Pattern):
    """Record pattern; matches any record carrying at least these labels."""

    fields: tuple[tuple[str, Pattern], ...]
    span: SourceSpan = span_field()


WILDCARD = "_"


def pattern_vars(p: Pattern) -> list[str]:
    """Variables bound by a pattern, in left-to-right order."""
    out: list[str] = []

    def walk(q: Pattern) -> None:
        match q:
            case PVar(name):
                if name != WILDCARD:
                    out.append(name)
            case PCon(_, args):
                for a in args:
                    walk(a)
            case PRec(fields):
                for _, a in fields:
                    walk(a)
            case PLit():
                pass

    walk(p)
    return out


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: Value
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Var(Expr):
    name: str
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class ResultVar(Expr):
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Construct(Expr):
    tag: str
    args: tuple[Expr, ...]
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Call(Expr):
    fname: str
    args: tuple[Expr, ...]
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class DottedCall(Expr):
    recv: Expr
    fname: str
    args: tuple[Expr, ...]
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class QualifiedCall(Expr):
    recv: Expr
    cls: str
    fname: str
    args: tuple[Expr, ...]
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Logical(Expr):
    op: str                       # and | or | not | implies | iff
    operands: tuple[Expr, ...]
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Builtin(Expr):
    """Application of a predefined operation (arithmetic, relational,
    sequence/record construction, numeric helpers)."""

    op: str
    args: tuple[Expr, ...]
    labels: tuple[str, ...] | None = None   # only for op == "mkrec"
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Quant(Expr):
    symbol: str                   # canonical quantifier name
    var: str
    collection: Expr
    filter: Expr
    body: Expr
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class FieldAccess(Expr):
    recv: Expr
    label: str
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class Index(Expr):
    recv: Expr
    index: Expr
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class RangeExpr(Expr):
    lo: Expr
    hi: Expr
    span: SourceSpan = span_field()


QUANT_SYMBOLS = (
    "exists", "forall", "sum", "product", "count", "select",
    "max", "maximizer", "min", "minimizer", "filterq", "mapq", "seqcons",
)

LOGICAL_OPS = ("and", "or", "not", "implies", "iff")


def free_vars(e: Expr) -> list[str]:
    """Free variable names in order of first occurrence (`Result` included)."""
    seen: list[str] = []

    def note(name: str) -> None:
        if name not in seen:
            seen.append(name)

    def walk(x: Expr, bound: frozenset[str]) -> None:
        match x:
            case Var(name):
                if name not in bound:
                    note(name)
            case ResultVar():
                if "Result" not in bound:
                    note("Result")
            case Lit():
                pass
            case Construct(_, args) | Call(_, args) | Builtin(_, args):
                for a in args:
                    walk(a, bound)
            case DottedCall(recv, _, args) | QualifiedCall(recv, _, _, args):
                walk(recv, bound)
                for a in args:
                    walk(a, bound)
            case Logical(_, operands):
                for a in operands:
                    walk(a, bound)
            case Quant(_, var, coll, filt, body):
                walk(coll, bound)
                inner = bound | {var}
                walk(filt, inner)
                walk(body, inner)
            case FieldAccess(recv, _):
                walk(recv, bound)
            case Index(recv, idx):
                walk(recv, bound)
                walk(idx, bound)
            case RangeExpr(lo, hi):
                walk(lo, bound)
                walk(hi, bound)
            case _:
                raise TypeError(f"not an expression: {x!r}")

    walk(e, frozenset())
    return seen


# --------------------------------------------------------------------------
# Declarations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AttrConstructor:
    tag: str
    components: tuple[tuple[str | None, TypeExpr], ...]
    span: SourceSpan = span_field()
    synthetic: bool = False       # tag auto-generated for an unlabeled alternative


@dataclass(frozen=True)
class OpDecl:
    kind: str                     # constructor | observer | modifier | friend
    name: str
    arg_types: tuple[TypeExpr, ...]
    result_type: TypeExpr | None  # implied for constructor/modifier
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class CheckMode:
    """How much of a pre/postcondition is runtime-checkable."""

    mode: str                     # full | conjunct_only | approximation
    checked: Expr
    unchecked: Expr | None = None

    def __post_init__(self):
        if self.mode == "full" and self.unchecked is not None:
            raise ValueError("full check carries no unchecked part")
        if self.mode != "full" and self.unchecked is None:
            raise ValueError(f"{self.mode} check requires an unchecked part")


FULL_TRUE = CheckMode("full", Lit(TRUE))


@dataclass(frozen=True)
class FunctionRule:
    cls: str
    fname: str
    args: tuple[Pattern, ...]
    pre: CheckMode
    post: CheckMode
    sol: Expr | None
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class TraversalRule:
    shape: Pattern
    items: tuple[Expr, ...]       # empty tuple is the empty traversal
    span: SourceSpan = span_field()


@dataclass(frozen=True)
class ClassDef:
    name: str
    type_params: tuple[str, ...]
    parents: tuple[str, ...]
    alternatives: tuple[AttrConstructor, ...]
    traversal_rules: tuple[TraversalRule, ...]
    rules: tuple[FunctionRule, ...]
    op_decls: tuple[OpDecl, ...]
    span: SourceSpan = span_field()


def qualify_tag(cls: str, tag: str) -> str:
    """Class-qualified constructor name; injective on (class, tag) pairs up to
    the concatenation collision check performed when a hierarchy is built."""
    return cls + tag


def synthetic_tag(cls: str) -> str:
    return "Mk" + cls
