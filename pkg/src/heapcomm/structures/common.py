"""Address layout, value sets, the Addr domain and the ℒ program loader."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional

from ..domain import CROSS, AbstractProgram, Abstraction, ValueSpace
from ..heap import FALSE, NULL, TRUE, Addr, Bool, Heap, Int, Pair, Value, value_key
from ..lang import ConcreteProgram, FreshPolicy, Stmt, lift, parse_source

# method arguments and results live in a low range away from the structures
ARG_A, ARG_B, OUT_R, OUT_S = 1, 2, 3, 4
CTR_P = 10
SET_P, SET_Q = 11, 12
STK_L = 13
CELL_POOL = tuple(range(20, 28))
JUNK_ADDRS = (40, 41)


@dataclass
class Op:
    """A concrete ℒ program with its abstract counterpart."""

    name: str
    concrete: ConcreteProgram
    abstract: AbstractProgram
    args: tuple = ()          # addresses bound to the program's parameters

    @property
    def domain(self) -> Abstraction:
        return self.abstract.domain


# -- value sets ---------------------------------------------------------------


def show_value(v) -> str:
    return repr(v)


def nat_values(max_n: int) -> ValueSpace:
    return ValueSpace(
        "ℕ", tuple(Int(n) for n in range(max_n + 1)),
        lambda v: type(v) is Int and v.n >= 0, show_value)


def nonnull_values(alphabet: Iterable[Value]) -> ValueSpace:
    """V*: every value except null, enumerated over ``alphabet``."""
    return ValueSpace("V*", tuple(alphabet),
                      lambda v: isinstance(v, Value) and v != NULL, show_value)


def all_values(alphabet: Iterable[Value]) -> ValueSpace:
    return ValueSpace("V", (NULL,) + tuple(alphabet),
                      lambda v: isinstance(v, Value), show_value)


BOOLS = ValueSpace("𝔹", (FALSE, TRUE), lambda v: type(v) is Bool, show_value)


def finite_values(name: str, alphabet: Iterable[Value]) -> ValueSpace:
    members = tuple(sorted(set(alphabet), key=value_key))
    allowed = frozenset(members)
    return ValueSpace(name, members, lambda v: v in allowed, show_value)


def int_alphabet(k: int) -> tuple:
    return tuple(Int(i) for i in range(1, k + 1))


# -- Addr -------------------------------------------------------------------

_CORRUPTIONS = (NULL, Int(-1), TRUE, Pair(NULL, NULL), Addr(99))


def make_addr(p: int, V: ValueSpace) -> Abstraction:
    """``Addr_p^V``: the value stored at ``p``, if it lies in ``V``."""

    def pi(h):
        v = h.get(p)
        if v is None or not V.contains(v):
            return CROSS
        return v

    def witness(h):
        return h.restrict((p,))

    def realize(x, count, rng):
        return [Heap._wrap({p: x})]

    def mutate(h):
        return [Heap._wrap({p: c}) for c in _CORRUPTIONS if not V.contains(c)]

    return Abstraction(f"Addr_{p}^{V.name}", V, pi, witness, realize, mutate)


# -- programs ---------------------------------------------------------------


@lru_cache(maxsize=None)
def load_source(name: str) -> tuple:
    """``(params, stmt)`` for a shipped program in ``programs/<name>.lang``."""
    text = resources.files("heapcomm").joinpath("programs", f"{name}.lang").read_text("utf-8")
    return parse_source(text)


def bind(stmt: Stmt, params: tuple, addrs: Iterable[int], name: str,
         fresh_width: int = 2) -> ConcreteProgram:
    addrs = tuple(addrs)
    if len(addrs) != len(params):
        raise ValueError(f"{name} takes {len(params)} address arguments, got {len(addrs)}")
    env = {x: Addr(a) for x, a in zip(params, addrs)}
    return lift(stmt, env, FreshPolicy(fresh_width), name)


def shipped(name: str, addrs: Iterable[int], label: Optional[str] = None,
            fresh_width: int = 2) -> ConcreteProgram:
    params, stmt = load_source(name)
    return bind(stmt, params, addrs, label or name, fresh_width)
