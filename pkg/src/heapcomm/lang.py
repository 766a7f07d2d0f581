"""A small imperative heap language and concrete programs over heaps.

Surface syntax::

    stmt  ::= simple [';' stmt]
    simple::= skip | fail | free target | target '<-' expr
            | let x = expr in stmt | if expr then stmt else stmt | '(' stmt ')'
    expr  ::= or-chains of '=' / '<' comparisons of '+' / '-' sums of
              unary terms: not / fst / snd / ref / '!' target / atom
    atom  ::= int | '@'int | null | true | false | ident | '(' expr [',' expr] ')'
    target::= ident | int | '@'int            (an integer target is an address)

``let`` bodies and ``else`` branches extend as far right as possible, so
``let x = !p in a <- x; free p`` binds ``x`` in both statements.

Execution is demonic: ``exec_stmt`` returns every final heap over all
fresh-address choices, or the empty set if any path fails.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Iterable, Optional

from .heap import (
    EMPTY,
    FALSE,
    NULL,
    TRUE,
    Addr,
    Bool,
    Heap,
    Int,
    Pair,
    Value,
    disjoint,
    is_subheap,
    union,
    value_key,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.msg = msg
        self.line = line
        self.col = col


class UnboundIdentifier(ParseError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        super().__init__(f"unbound identifier {name!r}", line, col)
        self.name = name


# -- abstract syntax --------------------------------------------------------


class Stmt:
    __slots__ = ()


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: Value


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Ref(Expr):
    init: Expr


@dataclass(frozen=True)
class Deref(Expr):
    target: Expr


@dataclass(frozen=True)
class MkPair(Expr):
    fst: Expr
    snd: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - = < ||
    left: Expr
    right: Expr


@dataclass(frozen=True)
class UnOp(Expr):
    op: str  # one of not fst snd
    arg: Expr


@dataclass(frozen=True)
class Write(Stmt):
    target: Expr
    value: Expr


@dataclass(frozen=True)
class Free(Stmt):
    target: Expr


@dataclass(frozen=True)
class Seq(Stmt):
    first: Stmt
    second: Stmt


@dataclass(frozen=True)
class Fail(Stmt):
    pass


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Let(Stmt):
    name: str
    expr: Expr
    body: Stmt


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    orelse: Stmt


# -- parser -----------------------------------------------------------------

_KEYWORDS = {
    "let", "in", "if", "then", "else", "free", "fail", "skip", "ref",
    "fst", "snd", "not", "null", "true", "false", "or",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<addr>@\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><-|:=|\|\||∨|[();,!=<+\-])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            t = m.group()
            if kind == "ident" and t in _KEYWORDS:
                kind = "kw"
            if t == "∨" or t == "or":
                kind, t = "op", "||"
            if t == ":=":
                t = "="
            toks.append(_Tok(kind, t, line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, params: Iterable[str]):
        self.toks = _lex(text)
        self.i = 0
        self.scope = [set(params)]

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return self.next()

    def bound(self, name: str) -> bool:
        return any(name in s for s in self.scope)

    def program(self) -> Stmt:
        s = self.stmt()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return s

    def stmt(self) -> Stmt:
        s = self.simple()
        if self.at(";"):
            self.next()
            return Seq(s, self.stmt())
        return s

    def simple(self) -> Stmt:
        t = self.tok
        if self.at("skip"):
            self.next()
            return Skip()
        if self.at("fail"):
            self.next()
            return Fail()
        if self.at("free"):
            self.next()
            return Free(self.target())
        if self.at("let"):
            self.next()
            name_tok = self.next()
            if name_tok.kind != "ident":
                self.error("expected identifier after 'let'", name_tok)
            self.expect("=")
            e = self.expr()
            self.expect("in")
            self.scope.append({name_tok.text})
            body = self.stmt()
            self.scope.pop()
            return Let(name_tok.text, e, body)
        if self.at("if"):
            self.next()
            c = self.expr()
            self.expect("then")
            a = self.stmt()
            self.expect("else")
            b = self.stmt()
            return If(c, a, b)
        if self.at("("):
            self.next()
            s = self.stmt()
            self.expect(")")
            return s
        if t.kind in ("ident", "int", "addr"):
            target = self.target()
            self.expect("<-")
            return Write(target, self.expr())
        self.error(f"expected a statement, found {t.text or 'end of input'!r}")

    def target(self) -> Expr:
        t = self.next()
        if t.kind == "ident":
            if not self.bound(t.text):
                raise UnboundIdentifier(t.text, t.line, t.col)
            return Var(t.text)
        if t.kind in ("int", "addr"):
            n = int(t.text.lstrip("@"))
            if n < 1:
                self.error("address 0 is reserved", t)
            return Lit(Addr(n))
        self.error(f"expected an address or identifier, found {t.text!r}", t)

    def expr(self) -> Expr:
        e = self.compare()
        while self.at("||"):
            self.next()
            e = BinOp("||", e, self.compare())
        return e

    def compare(self) -> Expr:
        e = self.additive()
        if self.at("=") or self.at("<"):
            op = self.next().text
            e = BinOp(op, e, self.additive())
        return e

    def additive(self) -> Expr:
        e = self.unary()
        while self.at("+") or self.at("-"):
            op = self.next().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at("not") or self.at("fst") or self.at("snd"):
            op = self.next().text
            return UnOp(op, self.unary())
        if self.at("ref"):
            self.next()
            return Ref(self.unary())
        if self.at("!"):
            self.next()
            return Deref(self.target())
        return self.atom()

    def atom(self) -> Expr:
        t = self.next()
        if t.kind == "int":
            return Lit(Int(int(t.text)))
        if t.kind == "addr":
            n = int(t.text[1:])
            if n < 1:
                self.error("address 0 is reserved", t)
            return Lit(Addr(n))
        if t.kind == "kw" and t.text in ("null", "true", "false"):
            return Lit({"null": NULL, "true": TRUE, "false": FALSE}[t.text])
        if t.kind == "ident":
            if not self.bound(t.text):
                raise UnboundIdentifier(t.text, t.line, t.col)
            return Var(t.text)
        if t.kind == "op" and t.text == "(":
            e = self.expr()
            if self.at(","):
                self.next()
                e = MkPair(e, self.expr())
            self.expect(")")
            return e
        self.error(f"expected a value, found {t.text or 'end of input'!r}", t)


def parse_program(text: str, params: Iterable[str] = ()) -> Stmt:
    """Parse ℒ source; ``params`` names identifiers bound from outside."""
    return _Parser(text, params).program()


_PARAMS_RE = re.compile(r"^#!\s*params:\s*(.*)$", re.MULTILINE)


def parse_source(text: str) -> tuple:
    """Parse a source file carrying an optional ``#! params: a b`` header.

    Returns ``(params, stmt)``.
    """
    m = _PARAMS_RE.search(text)
    params = tuple(m.group(1).replace(",", " ").split()) if m else ()
    return params, parse_program(text, params)


# -- evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class FreshPolicy:
    """``fresh(h)``: the ``k`` smallest addresses not allocated in ``h``."""

    k: int = 2

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("fresh width must be positive")

    def fresh(self, h: Heap) -> list:
        out, a = [], 1
        while len(out) < self.k:
            if a not in h:
                out.append(a)
            a += 1
        return out


class _Failure(Exception):
    pass


def _fail(why: str = ""):
    raise _Failure(why)


def _address(v: Value) -> int:
    if isinstance(v, Addr):
        return v.index
    _fail(f"not an address: {v!r}")


def _eval(e: Expr, h: Heap, env: dict, fp: FreshPolicy) -> list:
    """All ``(value, heap)`` outcomes of evaluating ``e``."""
    if isinstance(e, Lit):
        return [(e.value, h)]
    if isinstance(e, Var):
        return [(env[e.name], h)]
    if isinstance(e, Deref):
        out = []
        for t, h1 in _eval(e.target, h, env, fp):
            a = _address(t)
            if a not in h1:
                _fail(f"read of unallocated {a}")
            out.append((h1[a], h1))
        return out
    if isinstance(e, Ref):
        out = []
        for v, h1 in _eval(e.init, h, env, fp):
            for a in fp.fresh(h1):
                out.append((Addr(a), h1.set(a, v)))
        return out
    if isinstance(e, MkPair):
        return [
            (Pair(v1, v2), h2)
            for v1, h1 in _eval(e.fst, h, env, fp)
            for v2, h2 in _eval(e.snd, h1, env, fp)
        ]
    if isinstance(e, UnOp):
        return [(_unop(e.op, v), h1) for v, h1 in _eval(e.arg, h, env, fp)]
    if isinstance(e, BinOp):
        return [
            (_binop(e.op, v1, v2), h2)
            for v1, h1 in _eval(e.left, h, env, fp)
            for v2, h2 in _eval(e.right, h1, env, fp)
        ]
    raise TypeError(f"unknown expression {e!r}")


def _unop(op: str, v: Value) -> Value:
    if op == "not":
        if isinstance(v, Bool):
            return Bool(not v.b)
    elif isinstance(v, Pair):
        return v.fst if op == "fst" else v.snd
    _fail(f"{op} applied to {v!r}")


def _binop(op: str, a: Value, b: Value) -> Value:
    if op == "=":
        return Bool(a == b)
    if op == "||":
        if isinstance(a, Bool) and isinstance(b, Bool):
            return Bool(a.b or b.b)
    elif isinstance(a, Int) and isinstance(b, Int):
        if op == "+":
            return Int(a.n + b.n)
        if op == "-":
            return Int(a.n - b.n)
        if op == "<":
            return Bool(a.n < b.n)
    _fail(f"{op} applied to {a!r}, {b!r}")


def _exec(s: Stmt, h: Heap, env: dict, fp: FreshPolicy) -> list:
    if isinstance(s, Skip):
        return [h]
    if isinstance(s, Fail):
        _fail("fail")
    if isinstance(s, Seq):
        return [h2 for h1 in _exec(s.first, h, env, fp) for h2 in _exec(s.second, h1, env, fp)]
    if isinstance(s, Let):
        out = []
        for v, h1 in _eval(s.expr, h, env, fp):
            inner = dict(env)
            inner[s.name] = v
            out.extend(_exec(s.body, h1, inner, fp))
        return out
    if isinstance(s, If):
        out = []
        for c, h1 in _eval(s.cond, h, env, fp):
            if not isinstance(c, Bool):
                _fail(f"non-boolean condition {c!r}")
            out.extend(_exec(s.then if c.b else s.orelse, h1, env, fp))
        return out
    if isinstance(s, Write):
        out = []
        for t, h1 in _eval(s.target, h, env, fp):
            a = _address(t)
            for v, h2 in _eval(s.value, h1, env, fp):
                if a not in h2:
                    _fail(f"write to unallocated {a}")
                out.append(h2.set(a, v))
        return out
    if isinstance(s, Free):
        out = []
        for t, h1 in _eval(s.target, h, env, fp):
            a = _address(t)
            if a not in h1:
                _fail(f"free of unallocated {a}")
            out.append(h1.remove(a))
        return out
    raise TypeError(f"unknown statement {s!r}")


def exec_stmt(s: Stmt, h: Heap, fp: FreshPolicy = FreshPolicy(), env: Optional[dict] = None) -> frozenset:
    """Every final heap of ``s`` from ``h``; empty iff some path fails."""
    try:
        return frozenset(_exec(s, h, dict(env or {}), fp))
    except _Failure:
        return frozenset()


def addresses_of(s: Stmt, env: Optional[dict] = None) -> frozenset:
    """Address constants a program may touch: literals plus bound parameters."""
    found = set()

    def walk(node):
        if isinstance(node, Lit) and isinstance(node.value, Addr):
            found.add(node.value.index)
        elif isinstance(node, (Stmt, Expr)):
            for f in node.__dataclass_fields__:
                walk(getattr(node, f))

    walk(s)
    for v in (env or {}).values():
        if isinstance(v, Addr):
            found.add(v.index)
    return frozenset(found)


# -- concrete programs ------------------------------------------------------


class ConcreteProgram:
    """A total function from a heap to the finite set of its outcome heaps.

    ``addresses`` records fixed locations the program reads or writes; the
    bounded footprint check uses it to choose candidate extensions.
    """

    def __init__(self, run: Callable[[Heap], frozenset], name: str = "f",
                 addresses: Iterable[int] = (), cache: int = 1 << 16):
        self.name = name
        self.addresses = frozenset(addresses)
        self._run = lru_cache(maxsize=cache)(run) if cache else run

    def run(self, h: Heap) -> frozenset:
        return self._run(h)

    __call__ = run

    def __repr__(self) -> str:
        return f"ConcreteProgram({self.name})"


def lift(s: Stmt, env: Optional[dict] = None, fresh: FreshPolicy = FreshPolicy(),
         name: str = "f") -> ConcreteProgram:
    env = dict(env or {})
    return ConcreteProgram(lambda h: exec_stmt(s, h, fresh, env), name, addresses_of(s, env))


def transform(f: ConcreteProgram, heaps: Iterable[Heap]) -> frozenset:
    """The concrete transformer: union of outcomes, empty if any input fails."""
    out = set()
    for h in heaps:
        r = f(h)
        if not r:
            return frozenset()
        out |= r
    return frozenset(out)


def seq(f: ConcreteProgram, g: ConcreteProgram, name: Optional[str] = None) -> ConcreteProgram:
    return ConcreteProgram(lambda h: transform(g, f(h)), name or f"{f.name};{g.name}",
                           f.addresses | g.addresses)


SKIP = ConcreteProgram(lambda h: frozenset((h,)), "skip", cache=0)


def is_sufficient(f: ConcreteProgram, h: Heap) -> bool:
    return bool(f(h))


class Footprint:
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FootprintBound:
    """Extensions tried by ``in_footprint``: up to ``max_cells`` extra cells."""

    max_cells: int = 2
    extra_values: tuple = ()
    extra_addresses: tuple = ()


def extensions(f: ConcreteProgram, h: Heap, bound: FootprintBound = FootprintBound()):
    """Disjoint extension heaps over candidate addresses and a value pool."""
    addrs = set(f.addresses) | set(bound.extra_addresses)
    for v in h.values():
        if isinstance(v, Addr):
            addrs.add(v.index)
        elif isinstance(v, Pair):
            for w in (v.fst, v.snd):
                if isinstance(w, Addr):
                    addrs.add(w.index)
    top = max(set(h) | addrs, default=0)
    addrs.add(top + 1)
    addrs = sorted(a for a in addrs if a not in h)
    pool = h.values_pool() | {NULL, Int(0), Int(1)} | set(bound.extra_values)
    pool = sorted(pool, key=value_key)
    for r in range(1, bound.max_cells + 1):
        for cells in combinations(addrs, r):
            for vals in product(pool, repeat=r):
                yield Heap._wrap(dict(zip(cells, vals)))


def in_footprint(f: ConcreteProgram, h: Heap, bound: FootprintBound = FootprintBound(),
                 strict: bool = False) -> str:
    """Bounded footprint membership.

    ``YES`` if ``h`` is sufficient, ``NO`` if some tried extension makes
    ``f`` succeed.  Otherwise ``YES`` (within the bound), or ``UNKNOWN``
    when ``strict`` is set.
    """
    if is_sufficient(f, h):
        return Footprint.YES
    for ext in extensions(f, h, bound):
        if f(union(h, ext)):
            return Footprint.NO
    return Footprint.UNKNOWN if strict else Footprint.YES


def check_local_action(f: ConcreteProgram, h: Heap, frame: Heap) -> bool:
    if not disjoint(h, frame):
        raise ValueError("frame must be disjoint from the heap")
    if not f(h):
        return True
    out = f(union(h, frame))
    return bool(out) and all(is_subheap(frame, k) for k in out)


__all__ = [
    "ParseError", "UnboundIdentifier", "parse_program", "parse_source",
    "Stmt", "Expr", "Lit", "Var", "Ref", "Deref", "MkPair", "BinOp", "UnOp",
    "Write", "Free", "Seq", "Fail", "Skip", "Let", "If",
    "FreshPolicy", "exec_stmt", "addresses_of", "ConcreteProgram", "lift",
    "transform", "seq", "SKIP", "is_sufficient", "Footprint", "FootprintBound",
    "extensions", "in_footprint", "check_local_action", "EMPTY",
]
