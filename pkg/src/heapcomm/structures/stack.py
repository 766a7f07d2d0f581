"""The linked stack rooted at ℓ.

A stack ``[v1, ..., vk]`` (top first) lives on the heap as
``ℓ ↦ c1, c1 ↦ (v1, c2), ..., ck ↦ (vk, null)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..compose import conj_domain
from ..domain import BOT, CROSS, AbstractProgram, Abstraction, Val, ValueSpace
from ..heap import NULL, Addr, Heap, Int, Pair, Value
from .common import CELL_POOL, STK_L, Op, all_values, int_alphabet, make_addr, nonnull_values, shipped


def show_stack(s) -> str:
    return "[" + ", ".join(repr(v) for v in s) + "]"


def walk(h: Heap, l: int):
    """``(values, cell addresses)`` of the list rooted at ``l``, or None."""
    if l not in h:
        return None
    seen = {l}
    out, cells = [], []
    p = h[l]
    while p != NULL:
        if type(p) is not Addr:
            return None
        a = p.index
        if a in seen or a not in h:
            return None
        cell = h[a]
        if type(cell) is not Pair or cell.fst == NULL:
            return None
        seen.add(a)
        cells.append(a)
        out.append(cell.fst)
        p = cell.snd
    return tuple(out), cells


def layout(l: int, s, cells) -> Heap:
    c = {l: Addr(cells[0]) if s else NULL}
    for i, v in enumerate(s):
        nxt = Addr(cells[i + 1]) if i + 1 < len(s) else NULL
        c[cells[i]] = Pair(v, nxt)
    return Heap._wrap(c)


def make_stack_domain(l: int = STK_L, alphabet: tuple = int_alphabet(2), max_depth: int = 4,
                      pool: tuple = CELL_POOL) -> Abstraction:
    alphabet = tuple(alphabet)
    values = tuple(s for d in range(max_depth + 1) for s in product(alphabet, repeat=d))
    space = ValueSpace(
        "list(V*)", values,
        lambda s: isinstance(s, tuple) and all(isinstance(v, Value) and v != NULL for v in s),
        show_stack)

    def pi(h):
        found = walk(h, l)
        return CROSS if found is None else found[0]

    def witness(h):
        found = walk(h, l)
        return None if found is None else h.restrict([l] + found[1])

    def realize(s, count, rng):
        if not s:
            return [layout(l, s, [])]
        seen, out = set(), []
        tries = 0
        while len(out) < count and tries < 50 * count:
            tries += 1
            cells = tuple(rng.sample(pool, len(s)))
            if cells not in seen:
                seen.add(cells)
                out.append(layout(l, s, cells))
        return out

    def mutate(h):
        found = walk(h, l)
        if found is None:
            return []
        s, cells = found
        spare = next(a for a in pool if a not in h)
        if not cells:
            return [h.set(l, Addr(l)), h.set(l, Addr(spare)), h.set(l, Int(0))]
        first, last = cells[0], cells[-1]
        return [
            h.set(last, Pair(h[last].fst, Addr(first))),       # cycle
            h.set(first, Pair(NULL, h[first].snd)),            # null element
            h.set(last, Pair(h[last].fst, Addr(spare))),       # dangling pointer
            h.set(first, Int(0)),                              # not a cell
            h.remove(first),
        ]

    return Abstraction(f"Stk_{l}", space, pi, witness, realize, mutate)


@dataclass
class StackBundle:
    l: int
    alphabet: tuple
    domain: Abstraction
    fresh_width: int = 2

    def arg(self, a: int, nullable: bool = False) -> Abstraction:
        V = all_values(self.alphabet) if nullable else nonnull_values(self.alphabet)
        return make_addr(a, V)

    def push(self, a: int) -> Op:
        D = conj_domain(self.domain, self.arg(a))
        m = AbstractProgram(lambda x: Val(((x[1],) + x[0], x[1])), D, f"push^{a}")
        return Op(f"push_{a}", shipped("push", (self.l, a), f"push_{a}", self.fresh_width), m,
                  (self.l, a))

    def pop(self, a: int) -> Op:
        D = conj_domain(self.domain, self.arg(a))

        def fn(x):
            s = x[0]
            return BOT if not s else Val((s[1:], s[0]))

        return Op(f"pop_{a}", shipped("pop", (self.l, a), f"pop_{a}", self.fresh_width),
                  AbstractProgram(fn, D, f"pop^{a}"), (self.l, a))

    def peek(self, a: int) -> Op:
        D = conj_domain(self.domain, self.arg(a, nullable=True))

        def fn(x):
            s = x[0]
            return Val((s, s[0] if s else NULL))

        return Op(f"peek_{a}", shipped("peek", (self.l, a), f"peek_{a}", self.fresh_width),
                  AbstractProgram(fn, D, f"peek^{a}"), (self.l, a))


def make_stack(l: int = STK_L, alphabet: tuple | None = None, max_depth: int = 4,
               k: int = 2, fresh_width: int = 2) -> StackBundle:
    alphabet = tuple(alphabet) if alphabet is not None else int_alphabet(k)
    return StackBundle(l, alphabet, make_stack_domain(l, alphabet, max_depth), fresh_width)
