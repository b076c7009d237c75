"""Lexer, AST, recursive-descent parser and canonical printer for the heuristic DSL.

Grammar::

    expr  := let | ite | or
    let   := "let" IDENT "=" expr "in" expr
    ite   := "if" expr "then" expr "else" expr
    or    := and {"or" and}
    and   := cmp {"and" cmp}
    cmp   := add [("=="|"!="|"<"|"<="|">"|">=") add]
    add   := mul {("+"|"-") mul}
    mul   := unary {("*"|"/") unary}
    unary := ["-"] atom
    atom  := NUMBER | IDENT | call | "(" expr ")"
    call  := IDENT "(" [args] ")" | IDENT "(" IDENT "in" expr "," expr ")"

``#`` starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

KEYWORDS = {"let", "in", "if", "then", "else", "and", "or"}
CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")
MAX_DEPTH = 200
MAX_NESTING = 64

# name -> allowed arities; "map"/"filter" only in binder form
CORE_FUNCTIONS = {
    "sum": (1,),
    "count": (1,),
    "min": (1, 2),
    "max": (1, 2),
    "len": (1,),
    "abs": (1,),
    "zip": (2,),
    "range": (1,),
    "not": (1,),
    "at": (2,),
}
BINDERS = ("map", "filter")


class DSLError(Exception):
    """Base class for heuristic-language errors; ``kind`` names the fault class."""

    kind = "syntax"

    def __init__(self, message: str, line: int = 0, col: int = 0, span: str = ""):
        where = f" at {line}:{col}" if line else ""
        super().__init__(f"{self.kind} error{where}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.span = span


class DSLSyntaxError(DSLError):
    kind = "syntax"


class UnboundName(DSLError):
    kind = "unbound"


class ArityError(DSLError):
    kind = "syntax"


@dataclass(frozen=True)
class Pos:
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Node"
    body: "Node"
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: "Node"
    then: "Node"
    orelse: "Node"
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    pos: Pos = field(default=Pos(), compare=False, repr=False)


@dataclass(frozen=True)
class Bind:
    """``map(x in xs, body)`` / ``filter(x in xs, body)``."""

    func: str
    var: str
    coll: "Node"
    body: "Node"
    pos: Pos = field(default=Pos(), compare=False, repr=False)


Node = Union[Num, Var, Neg, BinOp, Let, If, Call, Bind]


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, KW, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|[<>+\-*/(),=])
    """,
    re.VERBOSE,
)


def tokenize(source: str) -> list[Token]:
    tokens = []
    i, line, line_start = 0, 1, 0
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        col = i - line_start + 1
        if not m:
            raise DSLSyntaxError(f"unexpected character {source[i]!r}", line, col, source[i])
        text = m.group()
        if m.lastgroup == "num":
            tokens.append(Token("NUM", text, line, col))
        elif m.lastgroup == "ident":
            tokens.append(Token("KW" if text in KEYWORDS else "IDENT", text, line, col))
        elif m.lastgroup == "op":
            tokens.append(Token("OP", text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = i + text.rfind("\n") + 1
        i = m.end()
    col = i - line_start + 1
    tokens.append(Token("EOF", "", line, col))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0
        self.depth = 0

    # -- helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, kind, text=None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind, text=None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            got = self.tok.text or "end of input"
            raise DSLSyntaxError(f"expected {want!r}, found {got!r}", self.tok.line, self.tok.col, self.tok.text)
        return self.advance()

    def pos(self) -> Pos:
        return Pos(self.tok.line, self.tok.col)

    # -- grammar
    def parse(self) -> Node:
        if self.at("EOF"):
            raise DSLSyntaxError("empty program", self.tok.line, self.tok.col)
        node = self.expr()
        if not self.at("EOF"):
            raise DSLSyntaxError(f"unexpected {self.tok.text!r}", self.tok.line, self.tok.col, self.tok.text)
        return node

    def expr(self) -> Node:
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise DSLSyntaxError("expression nested too deeply", self.tok.line, self.tok.col)
        try:
            if self.at("KW", "let"):
                return self.let()
            if self.at("KW", "if"):
                return self.ite()
            return self.or_()
        finally:
            self.depth -= 1

    def let(self) -> Node:
        pos = self.pos()
        self.advance()
        name = self.expect("IDENT").text
        self.expect("OP", "=")
        bound = self.expr()
        self.expect("KW", "in")
        return Let(name, bound, self.expr(), pos)

    def ite(self) -> Node:
        pos = self.pos()
        self.advance()
        cond = self.expr()
        self.expect("KW", "then")
        then = self.expr()
        self.expect("KW", "else")
        return If(cond, then, self.expr(), pos)

    def or_(self) -> Node:
        node = self.and_()
        while self.at("KW", "or"):
            pos = self.pos()
            self.advance()
            node = BinOp("or", node, self.and_(), pos)
        return node

    def and_(self) -> Node:
        node = self.cmp()
        while self.at("KW", "and"):
            pos = self.pos()
            self.advance()
            node = BinOp("and", node, self.cmp(), pos)
        return node

    def cmp(self) -> Node:
        node = self.add()
        if self.tok.kind == "OP" and self.tok.text in CMP_OPS:
            pos = self.pos()
            op = self.advance().text
            node = BinOp(op, node, self.add(), pos)
        return node

    def add(self) -> Node:
        node = self.mul()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            pos = self.pos()
            op = self.advance().text
            node = BinOp(op, node, self.mul(), pos)
        return node

    def mul(self) -> Node:
        node = self.unary()
        while self.tok.kind == "OP" and self.tok.text in "*/":
            pos = self.pos()
            op = self.advance().text
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self) -> Node:
        if self.at("OP", "-"):
            pos = self.pos()
            self.advance()
            return Neg(self.atom(), pos)
        return self.atom()

    def atom(self) -> Node:
        t = self.tok
        pos = self.pos()
        if t.kind == "NUM":
            self.advance()
            text = t.text
            if "." in text or "e" in text or "E" in text:
                value = float(text)
                if value != value or value in (float("inf"),):
                    raise DSLSyntaxError("numeric literal out of range", t.line, t.col, text)
                return Num(value, pos)
            return Num(int(text), pos)
        if t.kind == "IDENT":
            self.advance()
            if self.at("OP", "("):
                return self.call(t.text, pos)
            return Var(t.text, pos)
        if self.at("OP", "("):
            self.advance()
            node = self.expr()
            self.expect("OP", ")")
            return node
        got = t.text or "end of input"
        raise DSLSyntaxError(f"unexpected {got!r}", t.line, t.col, t.text)

    def call(self, name: str, pos: Pos) -> Node:
        self.expect("OP", "(")
        if self.tok.kind == "IDENT" and self.peek().kind == "KW" and self.peek().text == "in":
            var = self.advance().text
            self.advance()
            coll = self.expr()
            self.expect("OP", ",")
            body = self.expr()
            self.expect("OP", ")")
            return Bind(name, var, coll, body, pos)
        args = []
        if not self.at("OP", ")"):
            args.append(self.expr())
            while self.at("OP", ","):
                self.advance()
                args.append(self.expr())
        self.expect("OP", ")")
        return Call(name, tuple(args), pos)


def children(n: Node) -> tuple:
    if isinstance(n, Neg):
        return (n.operand,)
    if isinstance(n, BinOp):
        return (n.left, n.right)
    if isinstance(n, Let):
        return (n.bound, n.body)
    if isinstance(n, If):
        return (n.cond, n.then, n.orelse)
    if isinstance(n, Call):
        return n.args
    if isinstance(n, Bind):
        return (n.coll, n.body)
    return ()


def ast_depth(node: Node) -> int:
    deepest, stack = 0, [(node, 1)]
    while stack:
        n, d = stack.pop()
        deepest = max(deepest, d)
        stack.extend((c, d + 1) for c in children(n))
    return deepest


def parse(source: str) -> Node:
    """Parse ``source`` into an AST (syntax only; see :func:`check`)."""
    try:
        node = Parser(source).parse()
    except RecursionError:
        raise DSLSyntaxError("expression nested too deeply") from None
    if ast_depth(node) > MAX_DEPTH:
        raise DSLSyntaxError("expression nested too deeply")
    return node


def check(node: Node, names, functions: dict) -> None:
    """Reject unbound identifiers, unknown functions and arity mismatches."""

    def visit(n, scope):
        if isinstance(n, Num):
            return
        if isinstance(n, Var):
            if n.name not in scope:
                raise UnboundName(f"unbound identifier {n.name!r}", n.pos.line, n.pos.col, n.name)
        elif isinstance(n, Neg):
            visit(n.operand, scope)
        elif isinstance(n, BinOp):
            visit(n.left, scope)
            visit(n.right, scope)
        elif isinstance(n, Let):
            visit(n.bound, scope)
            visit(n.body, scope | {n.name})
        elif isinstance(n, If):
            visit(n.cond, scope)
            visit(n.then, scope)
            visit(n.orelse, scope)
        elif isinstance(n, Bind):
            if n.func not in BINDERS:
                raise ArityError(f"{n.func}() does not take a binder", n.pos.line, n.pos.col, n.func)
            visit(n.coll, scope)
            visit(n.body, scope | {n.var})
        elif isinstance(n, Call):
            if n.func in BINDERS:
                raise ArityError(f"{n.func}() needs the form {n.func}(x in xs, body)", n.pos.line, n.pos.col, n.func)
            if n.func not in functions:
                raise UnboundName(f"unknown function {n.func!r}", n.pos.line, n.pos.col, n.func)
            if len(n.args) not in functions[n.func]:
                arities = "/".join(map(str, functions[n.func]))
                raise ArityError(
                    f"{n.func}() takes {arities} argument(s), got {len(n.args)}", n.pos.line, n.pos.col, n.func
                )
            for a in n.args:
                visit(a, scope)

    visit(node, frozenset(names))


# -- printing ----------------------------------------------------------------

_LEVEL = {"or": 1, "and": 2, "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3, "+": 4, "-": 4, "*": 5, "/": 5}


def _num(v) -> str:
    if isinstance(v, float):
        text = repr(v)
        return text if any(c in text for c in ".e") else text + ".0"
    return str(v)


def to_source(node: Node) -> str:
    """Canonical text for ``node``; parsing it yields a structurally equal AST."""

    def show(n, level):
        # level: minimum binding strength the context requires (0 = any expr)
        if isinstance(n, Num):
            return _num(n.value)
        if isinstance(n, Var):
            return n.name
        if isinstance(n, Call):
            return f"{n.func}({', '.join(show(a, 0) for a in n.args)})"
        if isinstance(n, Bind):
            return f"{n.func}({n.var} in {show(n.coll, 0)}, {show(n.body, 0)})"
        if isinstance(n, Neg):
            text = "-" + show(n.operand, 7)
            return f"({text})" if level >= 7 else text
        if isinstance(n, BinOp):
            lv = _LEVEL[n.op]
            if lv == 3:
                text = f"{show(n.left, 4)} {n.op} {show(n.right, 4)}"
            else:
                text = f"{show(n.left, lv)} {n.op} {show(n.right, lv + 1)}"
            return f"({text})" if lv < level else text
        if isinstance(n, Let):
            text = f"let {n.name} = {show(n.bound, 0)} in {show(n.body, 0)}"
        else:
            text = f"if {show(n.cond, 0)} then {show(n.then, 0)} else {show(n.orelse, 0)}"
        return f"({text})" if level > 0 else text

    return show(node, 0)
