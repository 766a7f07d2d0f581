"""The commutativity tables for the four example structures.

Each row pairs two operations over a flat conjunction of leaf domains and
records the published condition (as a predicate on the row's flat value).
Compound rows also list their per-component sub-rows, which the compound
lemma conjoins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from ..bounds import Bounds
from ..compose import assemble, conj_domain, embed, flatten, leaves
from ..domain import AbstractProgram, Abstraction, identity
from .common import (ARG_A, ARG_B, BOOLS, CTR_P, OUT_R, OUT_S, SET_P, SET_Q, STK_L, Op, make_addr,
                     nat_values)
from .compound import make_compound
from .counter import make_ctr
from .stack import make_stack
from .twoset import make_twoset

SCOPES = ("nnc", "twoset", "stack", "compound")


def product_of(parts) -> Abstraction:
    parts = list(parts)
    return parts[0] if len(parts) == 1 else conj_domain(*parts)


@dataclass
class LemmaPart:
    """A component of a compound row: two programs over a subset of leaves."""

    indices: tuple
    domain: Abstraction
    m: AbstractProgram
    n: AbstractProgram

    def project(self, row_domain: Abstraction, x):
        flat = flatten(row_domain, x)
        return assemble(self.domain, [flat[i] for i in self.indices])


@dataclass
class TableRow:
    scope: str
    key: str                      # "incr,decr"
    domain: Abstraction
    a: Op                         # concrete program and abstract program embedded in domain
    b: Op
    condition_id: str
    stated_text: str
    stated: Callable              # predicate on the flat value list
    lemma: Optional[list] = None
    consistent: Optional[Callable] = None   # flat value list -> bool
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def m(self) -> AbstractProgram:
        return self.a.abstract

    @property
    def n(self) -> AbstractProgram:
        return self.b.abstract

    def stated_holds(self, x) -> bool:
        return bool(self.stated(flatten(self.domain, x)))

    def is_consistent(self, x) -> bool:
        return self.consistent is None or bool(self.consistent(flatten(self.domain, x)))


def _row(scope, key, leaf_list, a: Op, b: Op, pid, text, stated, **kw) -> TableRow:
    D = product_of(leaf_list)
    ea = Op(a.name, a.concrete, embed(a.abstract, D), a.args)
    eb = Op(b.name, b.concrete, embed(b.abstract, D), b.args)
    return TableRow(scope, key, D, ea, eb, pid, text, stated, **kw)


def _lemma_part(row_leaves, idx, m, n) -> LemmaPart:
    D = product_of([row_leaves[i] for i in idx])
    return LemmaPart(tuple(idx), D, embed(m, D), embed(n, D))


def _nnc(b: Bounds) -> list:
    ctr = make_ctr(CTR_P, b.counter_max, b.gen_counter_max, b.fresh_width, b.nat_max)
    C = ctr.domain
    R = make_addr(OUT_R, nat_values(b.nat_max))
    S = make_addr(OUT_S, nat_values(b.nat_max))
    incr, decr = ctr.incr(), ctr.decr()
    read_r, read_s = ctr.read(OUT_R), ctr.read(OUT_S)
    return [
        _row("nnc", "incr,incr", [C], incr, incr, "nnc.incr_incr", "⊤", lambda f: True),
        _row("nnc", "incr,decr", [C], incr, decr, "nnc.incr_decr", "n > 0", lambda f: f[0] > 0),
        _row("nnc", "decr,decr", [C], decr, decr, "nnc.decr_decr", "⊤", lambda f: True),
        _row("nnc", "incr,read", [C, R], incr, read_r, "nnc.incr_read", "⊥", lambda f: False),
        _row("nnc", "decr,read", [C, R], decr, read_r, "nnc.decr_read", "n = 0", lambda f: f[0] == 0),
        _row("nnc", "read,read", [C, R, S], read_r, read_s, "nnc.read_read", "⊤", lambda f: True),
    ]


def _twoset(b: Bounds) -> list:
    ts = make_twoset(SET_P, SET_Q, alphabet=b.set_alphabet, fresh_width=b.fresh_width)
    L = [ts.domain, ts.elem(ARG_A), make_addr(OUT_R, BOOLS), ts.elem(ARG_B), make_addr(OUT_S, BOOLS)]
    add_a, add_b = ts.add(ARG_A), ts.add(ARG_B)
    rem_a, rem_b = ts.rem(ARG_A), ts.rem(ARG_B)
    mem_a, mem_b = ts.mem(ARG_A, OUT_R), ts.mem(ARG_B, OUT_S)

    def add_add(f):
        S, u, _, v, _ = f
        return not S or len(S) == 2 or u in S or v in S or u == v

    def add_rem(f):
        S, u, _, v, _ = f
        return ((len(S) < 2 and u != v)
                or (len(S) == 2 and ((u not in S and v not in S) or (u in S and u != v))))

    def mem_add(f):
        S, u, _, v, _ = f
        return u != v or v in S or len(S) == 2

    def mem_rem(f):
        S, u, _, v, _ = f
        return u != v or v not in S

    return [
        _row("twoset", "add,add", L, add_a, add_b, "twoset.add_add",
             "S = ∅ ∨ |S| = 2 ∨ u ∈ S ∨ v ∈ S ∨ u = v", add_add),
        _row("twoset", "add,rem", L, add_a, rem_b, "twoset.add_rem",
             "|S| < 2 ∧ u ≠ v ∨ |S| = 2 ∧ (u,v ∉ S ∨ u ∈ S ∧ u ≠ v)", add_rem),
        _row("twoset", "rem,rem", L, rem_a, rem_b, "twoset.rem_rem", "⊤", lambda f: True),
        _row("twoset", "mem,add", L, mem_a, add_b, "twoset.mem_add", "u ≠ v ∨ v ∈ S ∨ |S| = 2", mem_add),
        _row("twoset", "mem,rem", L, mem_a, rem_b, "twoset.mem_rem", "u ≠ v ∨ v ∉ S", mem_rem),
        _row("twoset", "mem,mem", L, mem_a, mem_b, "twoset.mem_mem", "⊤", lambda f: True),
    ]


def _stack_bundle(b: Bounds):
    return make_stack(STK_L, k=b.stack_alphabet, max_depth=b.stack_depth, fresh_width=b.fresh_width)


def _heads(s, u) -> bool:
    return len(s) >= 1 and s[0] == u


def _double(s) -> bool:
    return len(s) >= 2 and s[0] == s[1]


def _stack(b: Bounds) -> list:
    st = _stack_bundle(b)
    K = st.domain
    Ua, Ub = st.arg(ARG_A), st.arg(ARG_B)
    Na, Nb = st.arg(ARG_A, nullable=True), st.arg(ARG_B, nullable=True)
    push_a, push_b = st.push(ARG_A), st.push(ARG_B)
    pop_a, pop_b = st.pop(ARG_A), st.pop(ARG_B)
    peek_a, peek_b = st.peek(ARG_A), st.peek(ARG_B)
    return [
        _row("stack", "push,push", [K, Ua, Ub], push_a, push_b, "stack.push_push", "u = v",
             lambda f: f[1] == f[2]),
        _row("stack", "push,pop", [K, Ua, Ub], push_a, pop_b, "stack.push_pop", "s = u :: _",
             lambda f: _heads(f[0], f[1])),
        _row("stack", "push,peek", [K, Ua, Nb], push_a, peek_b, "stack.push_peek", "s = u :: _",
             lambda f: _heads(f[0], f[1])),
        _row("stack", "pop,pop", [K, Ua, Ub], pop_a, pop_b, "stack.pop_pop", "∃x. s = x :: x :: _",
             lambda f: _double(f[0])),
        _row("stack", "pop,peek", [K, Ua, Nb], pop_a, peek_b, "stack.pop_peek", "∃x. s = x :: x :: _",
             lambda f: _double(f[0])),
        _row("stack", "peek,peek", [K, Na, Nb], peek_a, peek_b, "stack.peek_peek", "⊤",
             lambda f: True),
    ]


def _compound(b: Bounds) -> list:
    st = _stack_bundle(b)
    ctr = make_ctr(CTR_P, b.counter_max, b.gen_counter_max, b.fresh_width, b.nat_max)
    cb = make_compound(st, ctr)
    K, C = st.domain, ctr.domain
    arg = {
        ("a", "s"): st.arg(ARG_A), ("b", "s"): st.arg(ARG_B),
        ("a", "v"): st.arg(ARG_A, nullable=True), ("b", "v"): st.arg(ARG_B, nullable=True),
        ("a", "n"): make_addr(ARG_A, nat_values(b.nat_max)),
        ("b", "n"): make_addr(ARG_B, nat_values(b.nat_max)),
    }
    kind = {"cpush": "s", "cpop": "s", "cpeek": "v", "csize": "n"}

    def op(name, a):
        return getattr(cb, name)(a)

    # component programs: (stack side, counter side), each over its home domain
    def parts(name, a):
        if name == "cpush":
            return st.push(a).abstract, ctr.incr().abstract
        if name == "cpop":
            return st.pop(a).abstract, ctr.decr().abstract
        if name == "cpeek":
            return st.peek(a).abstract, identity(C)
        r = ctr.read(a).abstract
        return identity(K), r

    def consistent(f):
        return f[1] == len(f[0])

    entries = [
        ("cpush", "cpush", "u = v", lambda f: f[2] == f[3]),
        ("cpush", "cpop", "s = u :: _ ∧ n > 0", lambda f: _heads(f[0], f[2]) and f[1] > 0),
        ("cpush", "cpeek", "s = u :: _", lambda f: _heads(f[0], f[2])),
        ("cpush", "csize", "⊥", lambda f: False),
        ("cpop", "cpop", "∃x. s = x :: x :: _", lambda f: _double(f[0])),
        ("cpop", "cpeek", "∃x. s = x :: x :: _", lambda f: _double(f[0])),
        ("cpop", "csize", "s = _ :: _ ∧ n = 0", lambda f: len(f[0]) >= 1 and f[1] == 0),
        ("cpeek", "cpeek", "⊤", lambda f: True),
        ("cpeek", "csize", "⊤", lambda f: True),
        ("csize", "csize", "⊤", lambda f: True),
    ]
    rows = []
    for x, y, text, stated in entries:
        L = [K, C, arg[("a", kind[x])], arg[("b", kind[y])]]
        row = _row("compound", f"{x},{y}", L, op(x, ARG_A), op(y, ARG_B),
                   f"compound.{x}_{y}", text, stated, consistent=consistent)
        (sa, ca), (sb, cb_) = parts(x, ARG_A), parts(y, ARG_B)
        lemma = []
        for m, n in ((sa, sb), (ca, cb_)):
            names = {lf.name for lf in leaves(m.domain)} | {lf.name for lf in leaves(n.domain)}
            idx = [i for i, lf in enumerate(L) if lf.name in names]
            lemma.append(_lemma_part(L, idx, m, n))
        row.lemma = lemma
        rows.append(row)
    return rows


_BUILDERS = {"nnc": _nnc, "twoset": _twoset, "stack": _stack, "compound": _compound}


@lru_cache(maxsize=32)
def table(scope: str, bounds: Bounds = Bounds()) -> tuple:
    if scope not in _BUILDERS:
        raise KeyError(f"unknown scope {scope!r}; expected one of {', '.join(SCOPES)}")
    return tuple(_BUILDERS[scope](bounds))


def all_rows(bounds: Bounds = Bounds()) -> list:
    return [r for s in SCOPES for r in table(s, bounds)]


def find_row(key: str, bounds: Bounds = Bounds(), scope: Optional[str] = None) -> TableRow:
    """Look up a row by its pair key, e.g. ``"push,pop"``."""
    key = key.replace(" ", "")
    for s in ([scope] if scope else SCOPES):
        for r in table(s, bounds):
            if r.key == key:
                return r
    raise KeyError(f"no table row for pair {key!r}")
