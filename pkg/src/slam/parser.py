"""Concrete syntax for specification files (`.slam`) and expressions.

The grammar is a one-pass LL recursive descent over a hand-rolled lexer:

    class Name(P1, ...) extends A, B {
      case Tag(Type, ...)            alternative with positional components
      case tag { l: Type, ... }      labeled alternative wrapping a record
      case { l: Type, ... }          unlabeled single alternative (tag MkName)
      constructor F(T, ...)          observer F(T, ...) -> R
      modifier F(T, ...)             friend F(T, ...) -> R
      traverse Pattern => [item, ...]
      pre: <cond>                    optional, defaults to true
      call: Pattern.F(p1, ...)       or F(p1, ...)
      post: <cond>                   optional, defaults to true
      sol: <expr>                    optional
    }

A condition is `expr`, `check expr`, `and_check unchecked :: checked` or
`either_check unchecked :: checked`.  Quantifiers are written
`Q x in D | filter . body` (the filter may be omitted).  A `.` glued to its
left operand is field access / method call; the quantifier body separator is
a free-standing `.` surrounded by whitespace.  Operator precedence, loosest
first: quantifier body, iff, implies, or, and, not, relational, `..`,
additive, multiplicative, unary minus, application.  `#` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .ast import (
    AttrConstructor, Builtin, Call, CheckMode, ClassDef, Construct,
    Diagnostic, DottedCall, Expr, FieldAccess, FunctionRule, Index, Lit,
    Logical, OpDecl, PCon, PLit, PRec, PVar, Pattern, QualifiedCall, Quant,
    RangeExpr, RecordType, ResultVar, SourceSpan, TraversalRule, TypeExpr,
    TypeName, VBool, VInt, VReal, VStr, Var, FULL_TRUE,
)
from .builtins import CALLABLE, INFIX_OPS

SPEC_EXTENSION = ".slam"

KEYWORDS = {
    "class", "extends", "case", "constructor", "observer", "modifier",
    "friend", "traverse", "pre", "call", "post", "sol",
    "check", "and_check", "either_check",
    "and", "or", "not", "implies", "iff", "true", "false", "Result", "in",
    "exists", "forall", "sum", "product", "count", "select",
    "max", "argmax", "min", "argmin", "filter", "map", "seqof",
}

QUANT_KEYWORDS = {
    "exists": "exists", "forall": "forall", "sum": "sum", "product": "product",
    "count": "count", "select": "select", "max": "max", "argmax": "maximizer",
    "min": "min", "argmin": "minimizer", "filter": "filterq", "map": "mapq",
    "seqof": "seqcons",
}

QUANT_SURFACE = {v: k for k, v in QUANT_KEYWORDS.items()}

MEMBER_KEYWORDS = {
    "case", "constructor", "observer", "modifier", "friend", "traverse",
    "pre", "call", "post", "sol",
}


class ParseFailure(Exception):
    def __init__(self, diag: Diagnostic):
        super().__init__(str(diag))
        self.diag = diag


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str       # IDENT KEYWORD INT REAL STRING PUNCT EOF
    text: str
    span: SourceSpan
    glued: bool     # no whitespace between this token and the previous one


PUNCT2 = ("..", "::", "=>", "->", "!=", "<=", ">=")
PUNCT1 = "(){}[],:.|=<>+-*/"


def tokenize(source: str, filename: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    glued = False

    def span(length: int) -> SourceSpan:
        return SourceSpan(filename, line, col, length)

    def fail(msg: str, length: int = 1) -> ParseFailure:
        return ParseFailure(ast.error(span(length), msg, "LEX_ERROR"))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            glued = False
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            glued = False
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            glued = False
            continue
        if ch.isalpha():
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "KEYWORD" if text in KEYWORDS else "IDENT"
            toks.append(Token(kind, text, span(j - i), glued))
            col += j - i
            i = j
            glued = True
            continue
        if ch == "_" and (i + 1 >= n or not (source[i + 1].isalnum() or source[i + 1] == "_")):
            toks.append(Token("PUNCT", "_", span(1), glued))
            i += 1
            col += 1
            glued = True
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_real = False
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                is_real = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    is_real = True
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            toks.append(Token("REAL" if is_real else "INT", text, span(j - i), glued))
            col += j - i
            i = j
            glued = True
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    raise fail("unterminated string literal")
                if source[j] == "\\":
                    if j + 1 >= n:
                        raise fail("unterminated string escape")
                    esc = source[j + 1]
                    mapped = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\"}.get(esc)
                    if mapped is None:
                        raise fail(f"unknown string escape \\{esc}")
                    buf.append(mapped)
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                raise fail("unterminated string literal")
            toks.append(Token("STRING", "".join(buf), span(j + 1 - i), glued))
            col += j + 1 - i
            i = j + 1
            glued = True
            continue
        two = source[i:i + 2]
        if two in PUNCT2:
            toks.append(Token("PUNCT", two, span(2), glued))
            i += 2
            col += 2
            glued = True
            continue
        if ch in PUNCT1:
            toks.append(Token("PUNCT", ch, span(1), glued))
            i += 1
            col += 1
            glued = True
            continue
        raise fail(f"unexpected character {ch!r}")
    toks.append(Token("EOF", "", span(0), glued))
    return toks


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def at(self, text: str) -> bool:
        t = self.cur
        return t.kind in ("PUNCT", "KEYWORD") and t.text == text

    def at_kind(self, kind: str) -> bool:
        return self.cur.kind == kind

    def advance(self) -> Token:
        t = self.cur
        if t.kind != "EOF":
            self.pos += 1
        return t

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str, what: str | None = None) -> Token:
        if self.at(text):
            return self.advance()
        raise self.fail(f"expected {text!r}" + (f" {what}" if what else ""))

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.at_kind("IDENT"):
            return self.advance()
        if self.cur.kind == "KEYWORD" and self.cur.text == "Result":
            raise self.fail("'Result' is reserved and cannot be used here",
                            code="RESERVED_RESULT")
        raise self.fail(f"expected {what}, found {self._describe()}")

    def _describe(self) -> str:
        t = self.cur
        if t.kind == "EOF":
            return "end of input"
        return repr(t.text)

    def fail(self, msg: str, code: str = "SYNTAX") -> ParseFailure:
        return ParseFailure(ast.error(self.cur.span, msg, code))

    # -- specifications -----------------------------------------------------

    def parse_spec(self) -> tuple[list[ClassDef], list[Diagnostic]]:
        defs: list[ClassDef] = []
        diags: list[Diagnostic] = []
        while not self.at_kind("EOF"):
            if not self.at("class"):
                diags.append(ast.error(self.cur.span,
                                       f"expected 'class', found {self._describe()}",
                                       "SYNTAX"))
                self._sync_to_class()
                continue
            try:
                defs.append(self.parse_class())
            except ParseFailure as exc:
                diags.append(exc.diag)
                self._sync_to_class()
        return defs, diags

    def _sync_to_class(self) -> None:
        depth = 0
        while not self.at_kind("EOF"):
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                depth -= 1
                if depth <= 0:
                    self.advance()
                    return
            elif depth == 0 and self.at("class"):
                return
            self.advance()

    def parse_class(self) -> ClassDef:
        start = self.expect("class")
        name = self.expect_ident("class name").text
        params: list[str] = []
        if self.accept("("):
            while not self.at(")"):
                params.append(self.expect_ident("type parameter").text)
                if not self.accept(","):
                    break
            self.expect(")")
        parents: list[str] = []
        if self.accept("extends"):
            parents.append(self.expect_ident("parent class").text)
            while self.accept(","):
                parents.append(self.expect_ident("parent class").text)
        self.expect("{", "to open the class body")
        alternatives: list[AttrConstructor] = []
        traversals: list[TraversalRule] = []
        rules: list[FunctionRule] = []
        decls: list[OpDecl] = []
        while not self.at("}"):
            if self.at_kind("EOF"):
                raise self.fail("unbalanced '{' in class body", code="UNBALANCED")
            if self.at("case"):
                alternatives.append(self.parse_case(name))
            elif self.cur.text in ("constructor", "observer", "modifier", "friend"):
                decls.append(self.parse_op_decl())
            elif self.at("traverse"):
                traversals.append(self.parse_traversal())
            elif self.at("pre") or self.at("call"):
                rules.append(self.parse_rule(name))
            else:
                raise self.fail(f"expected a class member, found {self._describe()}",
                                code="UNKNOWN_MEMBER")
        self.expect("}")
        return ClassDef(name, tuple(params), tuple(parents), tuple(alternatives),
                        tuple(traversals), tuple(rules), tuple(decls),
                        span=start.span)

    def parse_case(self, cls: str) -> AttrConstructor:
        start = self.expect("case")
        if self.at_kind("IDENT"):
            tag = self.advance().text
            synthetic = False
        else:
            tag = ast.synthetic_tag(cls)
            synthetic = True
        comps: list[tuple[str | None, TypeExpr]] = []
        if self.accept("("):
            while not self.at(")"):
                comps.append((None, self.parse_type()))
                if not self.accept(","):
                    break
            self.expect(")")
        elif self.at("{"):
            # Labeled alternative: a single component holding the record.
            comps.append((None, self.parse_record_type()))
        else:
            raise self.fail("expected '(' or '{' after case tag")
        return AttrConstructor(tag, tuple(comps), span=start.span, synthetic=synthetic)

    def parse_type(self) -> TypeExpr:
        if self.at("{"):
            return self.parse_record_type()
        name = self.expect_ident("type name").text
        args: list[TypeExpr] = []
        if self.accept("("):
            while not self.at(")"):
                args.append(self.parse_type())
                if not self.accept(","):
                    break
            self.expect(")")
        return TypeName(name, tuple(args))

    def parse_record_type(self) -> RecordType:
        self.expect("{")
        fields: list[tuple[str, TypeExpr]] = []
        while not self.at("}"):
            label = self.expect_ident("field label").text
            self.expect(":")
            fields.append((label, self.parse_type()))
            if not self.accept(","):
                break
        self.expect("}")
        return RecordType(tuple(fields))

    def parse_op_decl(self) -> OpDecl:
        kw = self.advance()
        name = self.expect_ident("operation name").text
        self.expect("(")
        args: list[TypeExpr] = []
        while not self.at(")"):
            args.append(self.parse_type())
            if not self.accept(","):
                break
        self.expect(")")
        result: TypeExpr | None = None
        if kw.text in ("observer", "friend"):
            self.expect("->", "before the result type")
            result = self.parse_type()
        return OpDecl(kw.text, name, tuple(args), result, span=kw.span)

    def parse_traversal(self) -> TraversalRule:
        start = self.expect("traverse")
        shape = self.parse_pattern()
        self.expect("=>")
        self.expect("[")
        items: list[Expr] = []
        while not self.at("]"):
            items.append(self.parse_expr_inner())
            if not self.accept(","):
                break
        self.expect("]")
        return TraversalRule(shape, tuple(items), span=start.span)

    # -- rules ----------------------------------------------------------------

    def parse_rule(self, cls: str) -> FunctionRule:
        start = self.cur
        pre = FULL_TRUE
        if self.accept("pre"):
            self.expect(":")
            pre = self.parse_condition()
        self.expect("call", "to introduce the rule's call scheme")
        self.expect(":")
        fname, args = self.parse_call_scheme()
        post = FULL_TRUE
        if self.accept("post"):
            self.expect(":")
            post = self.parse_condition()
        sol: Expr | None = None
        if self.accept("sol"):
            self.expect(":")
            sol = self.parse_expr_inner()
        return FunctionRule(cls, fname, tuple(args), pre, post, sol, span=start.span)

    def parse_condition(self) -> CheckMode:
        if self.accept("check"):
            return CheckMode("full", self.parse_expr_inner())
        if self.at("and_check") or self.at("either_check"):
            kw = self.advance()
            unchecked = self.parse_expr_inner()
            self.expect("::", "between the unchecked and checked parts")
            checked = self.parse_expr_inner()
            mode = "conjunct_only" if kw.text == "and_check" else "approximation"
            return CheckMode(mode, checked, unchecked)
        return CheckMode("full", self.parse_expr_inner())

    def parse_call_scheme(self) -> tuple[str, list[Pattern]]:
        first = self.parse_pattern()
        if self.at(".") and self.cur.glued:
            self.advance()
            fname = self.expect_ident("function name").text
            args = [first] + self.parse_pattern_args()
            return fname, args
        if isinstance(first, PCon):
            return first.tag, list(first.args)
        raise self.fail("a call scheme is f(patterns) or receiver.f(patterns)")

    def parse_pattern_args(self) -> list[Pattern]:
        self.expect("(")
        args: list[Pattern] = []
        while not self.at(")"):
            args.append(self.parse_pattern())
            if not self.accept(","):
                break
        self.expect(")")
        return args

    def parse_pattern(self) -> Pattern:
        t = self.cur
        if self.accept("_"):
            return PVar(ast.WILDCARD, span=t.span)
        if t.kind == "INT":
            self.advance()
            return PLit(VInt(int(t.text)), span=t.span)
        if t.kind == "REAL":
            self.advance()
            return PLit(VReal(float(t.text)), span=t.span)
        if t.kind == "STRING":
            self.advance()
            return PLit(VStr(t.text), span=t.span)
        if self.accept("-"):
            num = self.advance()
            if num.kind == "INT":
                return PLit(VInt(-int(num.text)), span=t.span)
            if num.kind == "REAL":
                return PLit(VReal(-float(num.text)), span=t.span)
            raise self.fail("expected a number after '-' in a pattern")
        if t.text in ("true", "false") and t.kind == "KEYWORD":
            self.advance()
            return PLit(VBool(t.text == "true"), span=t.span)
        if t.text == "Result":
            raise self.fail("'Result' is reserved and cannot appear in a pattern",
                            code="RESERVED_RESULT")
        if self.at("{"):
            return self.parse_record_pattern(t.span)
        name = self.expect_ident("pattern").text
        if self.at("("):
            args = self.parse_pattern_args()
            return PCon(name, tuple(args), span=t.span)
        if self.at("{"):
            rec = self.parse_record_pattern(t.span)
            return PCon(name, (rec,), span=t.span)
        return PVar(name, span=t.span)

    def parse_record_pattern(self, span: SourceSpan) -> PRec:
        self.expect("{")
        fields: list[tuple[str, Pattern]] = []
        while not self.at("}"):
            label = self.expect_ident("field label").text
            self.expect(":")
            fields.append((label, self.parse_pattern()))
            if not self.accept(","):
                break
        self.expect("}")
        return PRec(tuple(fields), span=span)

    # -- expressions ----------------------------------------------------------

    def parse_expr_inner(self) -> Expr:
        return self.parse_iff()

    def parse_iff(self) -> Expr:
        left = self.parse_implies()
        while self.at("iff"):
            sp = self.advance().span
            right = self.parse_implies()
            left = Logical("iff", (left, right), span=sp)
        return left

    def parse_implies(self) -> Expr:
        left = self.parse_or()
        if self.at("implies"):
            sp = self.advance().span
            right = self.parse_implies()
            return Logical("implies", (left, right), span=sp)
        return left

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.at("or"):
            sp = self.advance().span
            left = Logical("or", (left, self.parse_and()), span=sp)
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.at("and"):
            sp = self.advance().span
            left = Logical("and", (left, self.parse_not()), span=sp)
        return left

    def parse_not(self) -> Expr:
        if self.at("not"):
            sp = self.advance().span
            return Logical("not", (self.parse_not(),), span=sp)
        return self.parse_relational()

    def parse_relational(self) -> Expr:
        left = self.parse_range_level()
        for sym in ("=", "!=", "<=", ">=", "<", ">"):
            if self.at(sym):
                sp = self.advance().span
                right = self.parse_range_level()
                return Builtin(INFIX_OPS[sym], (left, right), span=sp)
        return left

    def parse_range_level(self) -> Expr:
        left = self.parse_additive()
        if self.at(".."):
            sp = self.advance().span
            right = self.parse_additive()
            return RangeExpr(left, right, span=sp)
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_multiplicative()
        while self.at("+") or self.at("-"):
            op = self.advance()
            right = self.parse_multiplicative()
            left = Builtin(INFIX_OPS[op.text], (left, right), span=op.span)
        return left

    def parse_multiplicative(self) -> Expr:
        left = self.parse_unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            right = self.parse_unary()
            left = Builtin(INFIX_OPS[op.text], (left, right), span=op.span)
        return left

    def parse_unary(self) -> Expr:
        if self.at("-"):
            sp = self.advance().span
            inner = self.parse_unary()
            match inner:
                case Lit(VInt(n)):
                    return Lit(VInt(-n), span=sp)
                case Lit(VReal(x)):
                    return Lit(VReal(-x), span=sp)
            return Builtin("neg", (inner,), span=sp)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        while True:
            if self.at(".") and self.cur.glued:
                self.advance()
                name = self.expect_ident("field or function name").text
                if self.accept(":"):
                    fname = self.expect_ident("function name").text
                    args = self.parse_expr_args()
                    e = QualifiedCall(e, name, fname, tuple(args), span=self.cur.span)
                elif self.at("("):
                    args = self.parse_expr_args()
                    e = DottedCall(e, name, tuple(args), span=self.cur.span)
                else:
                    e = FieldAccess(e, name, span=self.cur.span)
            elif self.at("(") and not isinstance(e, (Var, Call)):
                # Application of a non-name is sequence indexing.
                sp = self.cur.span
                args = self.parse_expr_args()
                if len(args) != 1:
                    raise self.fail("indexing takes exactly one argument")
                e = Index(e, args[0], span=sp)
            else:
                return e

    def parse_expr_args(self) -> list[Expr]:
        self.expect("(")
        args: list[Expr] = []
        while not self.at(")"):
            args.append(self.parse_expr_inner())
            if not self.accept(","):
                break
        self.expect(")")
        return args

    def parse_primary(self) -> Expr:
        t = self.cur
        if t.kind == "INT":
            self.advance()
            return Lit(VInt(int(t.text)), span=t.span)
        if t.kind == "REAL":
            self.advance()
            return Lit(VReal(float(t.text)), span=t.span)
        if t.kind == "STRING":
            self.advance()
            return Lit(VStr(t.text), span=t.span)
        if t.kind == "KEYWORD":
            if t.text in ("true", "false"):
                self.advance()
                return Lit(VBool(t.text == "true"), span=t.span)
            if t.text == "Result":
                self.advance()
                return ResultVar(span=t.span)
            if t.text in QUANT_KEYWORDS:
                return self.parse_quantifier()
        if self.accept("("):
            e = self.parse_expr_inner()
            self.expect(")")
            return e
        if self.at("["):
            self.advance()
            items: list[Expr] = []
            while not self.at("]"):
                items.append(self.parse_expr_inner())
                if not self.accept(","):
                    break
            self.expect("]")
            return Builtin("mkseq", tuple(items), span=t.span)
        if self.at("{"):
            return self.parse_record_expr(t.span)
        if t.kind == "IDENT":
            name = self.advance().text
            if self.at("(") and self.cur.glued:
                args = self.parse_expr_args()
                return Call(name, tuple(args), span=t.span)
            if self.at("{"):
                rec = self.parse_record_expr(t.span)
                return Construct(name, (rec,), span=t.span)
            return Var(name, span=t.span)
        raise self.fail(f"expected an expression, found {self._describe()}")

    def parse_record_expr(self, span: SourceSpan) -> Builtin:
        self.expect("{")
        labels: list[str] = []
        values: list[Expr] = []
        while not self.at("}"):
            label = self.expect_ident("field label").text
            if label in labels:
                raise self.fail(f"duplicate record field {label!r}", code="DUP_FIELD")
            self.expect(":")
            labels.append(label)
            values.append(self.parse_expr_inner())
            if not self.accept(","):
                break
        self.expect("}")
        return Builtin("mkrec", tuple(values), labels=tuple(labels), span=span)

    def parse_quantifier(self) -> Quant:
        kw = self.advance()
        symbol = QUANT_KEYWORDS[kw.text]
        var = self.expect_ident("quantified variable").text
        self.expect("in", "after the quantified variable")
        coll = self.parse_expr_inner()
        if self.accept("|"):
            filt = self.parse_expr_inner()
        else:
            filt = Lit(ast.TRUE, span=kw.span)
        if not (self.at(".") and not self.cur.glued):
            raise self.fail("expected a free-standing '.' before the quantifier body")
        self.advance()
        body = self.parse_expr_inner()
        return Quant(symbol, var, coll, filt, body, span=kw.span)


# --------------------------------------------------------------------------
# Entry points
# --------------------------------------------------------------------------

def parse_spec(source: str, filename: str = "<spec>") -> tuple[list[ClassDef], list[Diagnostic]]:
    """Parse a specification.  Returns (defs, diagnostics); when any error
    diagnostic is present the def list is empty."""
    try:
        toks = tokenize(source, filename)
    except ParseFailure as exc:
        return [], [exc.diag]
    defs, diags = _Parser(toks).parse_spec()
    if ast.has_errors(diags):
        return [], diags
    return defs, diags


def parse_expr(source: str, filename: str = "<expr>") -> tuple[Expr | None, list[Diagnostic]]:
    try:
        toks = tokenize(source, filename)
        p = _Parser(toks)
        e = p.parse_expr_inner()
        if not p.at_kind("EOF"):
            raise p.fail(f"trailing input after expression: {p._describe()}")
        return e, []
    except ParseFailure as exc:
        return None, [exc.diag]


def parse_spec_file(path) -> tuple[list[ClassDef], list[Diagnostic]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read(), str(path))


# --------------------------------------------------------------------------
# Pretty printer
# --------------------------------------------------------------------------

_LEVEL_QUANT = 0
_LEVEL_IFF = 1
_LEVEL_IMPLIES = 2
_LEVEL_OR = 3
_LEVEL_AND = 4
_LEVEL_NOT = 5
_LEVEL_REL = 6
_LEVEL_RANGE = 7
_LEVEL_ADD = 8
_LEVEL_MUL = 9
_LEVEL_UNARY = 10
_LEVEL_POSTFIX = 11

_INFIX_SURFACE = {v: k for k, v in INFIX_OPS.items()}
_REL_OPS = {"eq", "ne", "lt", "le", "gt", "ge"}


def expr_to_text(e: Expr, level: int = _LEVEL_QUANT) -> str:
    def wrap(text: str, own: int) -> str:
        return f"({text})" if own < level else text

    match e:
        case Lit(v):
            return ast.pretty_value(v)
        case Var(name):
            return name
        case ResultVar():
            return "Result"
        case Construct(tag, args):
            if len(args) == 1 and isinstance(args[0], Builtin) and args[0].op == "mkrec":
                return tag + expr_to_text(args[0], _LEVEL_POSTFIX)
            return f"{tag}({', '.join(expr_to_text(a) for a in args)})"
        case Call(fname, args):
            return f"{fname}({', '.join(expr_to_text(a) for a in args)})"
        case DottedCall(recv, fname, args):
            inner = expr_to_text(recv, _LEVEL_POSTFIX)
            return f"{inner}.{fname}({', '.join(expr_to_text(a) for a in args)})"
        case QualifiedCall(recv, cls, fname, args):
            inner = expr_to_text(recv, _LEVEL_POSTFIX)
            return f"{inner}.{cls}:{fname}({', '.join(expr_to_text(a) for a in args)})"
        case Logical("not", (operand,)):
            return wrap(f"not {expr_to_text(operand, _LEVEL_NOT)}", _LEVEL_NOT)
        case Logical("and" | "or" as op, (a, b)):
            own = _LEVEL_AND if op == "and" else _LEVEL_OR
            return wrap(f"{expr_to_text(a, own)} {op} {expr_to_text(b, own + 1)}", own)
        case Logical("implies", (a, b)):
            return wrap(f"{expr_to_text(a, _LEVEL_IMPLIES + 1)} implies "
                        f"{expr_to_text(b, _LEVEL_IMPLIES)}", _LEVEL_IMPLIES)
        case Logical("iff", (a, b)):
            return wrap(f"{expr_to_text(a, _LEVEL_IFF)} iff "
                        f"{expr_to_text(b, _LEVEL_IFF + 1)}", _LEVEL_IFF)
        case Builtin("mkseq", args):
            return "[" + ", ".join(expr_to_text(a) for a in args) + "]"
        case Builtin("mkrec", args, labels):
            inner = ", ".join(f"{l}: {expr_to_text(a)}" for l, a in zip(labels, args))
            return "{" + inner + "}"
        case Builtin("neg", (a,)):
            return wrap(f"-{expr_to_text(a, _LEVEL_UNARY)}", _LEVEL_UNARY)
        case Builtin(op, (a, b)) if op in _REL_OPS:
            text = (f"{expr_to_text(a, _LEVEL_REL + 1)} {_INFIX_SURFACE[op]} "
                    f"{expr_to_text(b, _LEVEL_REL + 1)}")
            return wrap(text, _LEVEL_REL)
        case Builtin("add" | "sub" as op, (a, b)):
            text = (f"{expr_to_text(a, _LEVEL_ADD)} {_INFIX_SURFACE[op]} "
                    f"{expr_to_text(b, _LEVEL_ADD + 1)}")
            return wrap(text, _LEVEL_ADD)
        case Builtin("mul" | "div" as op, (a, b)):
            text = (f"{expr_to_text(a, _LEVEL_MUL)} {_INFIX_SURFACE[op]} "
                    f"{expr_to_text(b, _LEVEL_MUL + 1)}")
            return wrap(text, _LEVEL_MUL)
        case Builtin(op, args) if op in CALLABLE:
            return f"{op}({', '.join(expr_to_text(a) for a in args)})"
        case Quant(symbol, var, coll, filt, body):
            text = (f"{QUANT_SURFACE[symbol]} {var} in {expr_to_text(coll)} | "
                    f"{expr_to_text(filt)} . {expr_to_text(body)}")
            return wrap(text, _LEVEL_QUANT)
        case FieldAccess(recv, label):
            return f"{expr_to_text(recv, _LEVEL_POSTFIX)}.{label}"
        case Index(recv, idx):
            return f"{expr_to_text(recv, _LEVEL_POSTFIX)}({expr_to_text(idx)})"
        case RangeExpr(lo, hi):
            text = f"{expr_to_text(lo, _LEVEL_ADD)} .. {expr_to_text(hi, _LEVEL_ADD)}"
            return wrap(text, _LEVEL_RANGE)
    raise TypeError(f"cannot print {e!r}")


def pattern_to_text(p: Pattern) -> str:
    match p:
        case PVar(name):
            return name
        case PLit(v):
            return ast.pretty_value(v)
        case PCon(tag, (PRec() as rec,)):
            return tag + pattern_to_text(rec)
        case PCon(tag, args):
            return f"{tag}({', '.join(pattern_to_text(a) for a in args)})"
        case PRec(fields):
            inner = ", ".join(f"{l}: {pattern_to_text(q)}" for l, q in fields)
            return "{ " + inner + " }" if inner else "{}"
    raise TypeError(f"cannot print {p!r}")


def type_to_text(t: TypeExpr) -> str:
    match t:
        case TypeName(name, ()):
            return name
        case TypeName(name, args):
            return f"{name}({', '.join(type_to_text(a) for a in args)})"
        case RecordType(fields):
            inner = ", ".join(f"{l}: {type_to_text(x)}" for l, x in fields)
            return "{ " + inner + " }"
    raise TypeError(f"cannot print {t!r}")


def _condition_to_text(c: CheckMode) -> str:
    if c.mode == "full":
        return expr_to_text(c.checked)
    kw = "and_check" if c.mode == "conjunct_only" else "either_check"
    return f"{kw} {expr_to_text(c.unchecked)} :: {expr_to_text(c.checked)}"


def pretty_print(defs: list[ClassDef]) -> str:
    """Canonical text; reparsing it yields a structurally equal AST."""
    out: list[str] = []
    for d in defs:
        header = f"class {d.name}"
        if d.type_params:
            header += f"({', '.join(d.type_params)})"
        if d.parents:
            header += " extends " + ", ".join(d.parents)
        out.append(header + " {")
        for alt in d.alternatives:
            tag = "" if alt.synthetic else alt.tag
            if (len(alt.components) == 1 and alt.components[0][0] is None
                    and isinstance(alt.components[0][1], RecordType)):
                out.append(f"  case {tag}{'' if not tag else ' '}{type_to_text(alt.components[0][1])}")
            else:
                comps = ", ".join(type_to_text(t) for _, t in alt.components)
                out.append(f"  case {tag}({comps})")
        for decl in d.op_decls:
            args = ", ".join(type_to_text(t) for t in decl.arg_types)
            line = f"  {decl.kind} {decl.name}({args})"
            if decl.result_type is not None:
                line += f" -> {type_to_text(decl.result_type)}"
            out.append(line)
        for trav in d.traversal_rules:
            items = ", ".join(expr_to_text(i) for i in trav.items)
            out.append(f"  traverse {pattern_to_text(trav.shape)} => [{items}]")
        for rule in d.rules:
            out.append("")
            if rule.pre != FULL_TRUE:
                out.append(f"  pre: {_condition_to_text(rule.pre)}")
            recv = ""
            args = rule.args
            out.append(f"  call: {rule.fname}({', '.join(pattern_to_text(a) for a in args)})")
            if rule.post != FULL_TRUE:
                out.append(f"  post: {_condition_to_text(rule.post)}")
            if rule.sol is not None:
                out.append(f"  sol: {expr_to_text(rule.sol)}")
        out.append("}")
        out.append("")
    return "\n".join(out)
