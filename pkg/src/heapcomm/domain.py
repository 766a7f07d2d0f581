"""Abstractions ⟨X, π⟩ and the five-region lattice built around them.

Lattice elements are either ``Val(x)`` for an abstract value ``x`` or one of
the four markers ``BOT``, ``CHECK`` (ambiguous in-purview), ``CROSS``
(out-of-purview) and ``TOP``.  The order is::

    BOT ≤ Val(x) ≤ CHECK ≤ TOP        BOT ≤ CROSS ≤ TOP

with distinct ``Val``s incomparable and ``Val``/``CROSS`` incomparable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

from .heap import Heap, disjoint, is_subheap, union


class Mark(enum.Enum):
    BOT = "⊥"
    CHECK = "✓"
    CROSS = "✗"
    TOP = "⊤"

    def __repr__(self) -> str:
        return self.value


BOT = Mark.BOT
CHECK = Mark.CHECK
CROSS = Mark.CROSS
TOP = Mark.TOP


@dataclass(frozen=True, slots=True)
class Val:
    x: Any

    def __repr__(self) -> str:
        return f"Val({self.x!r})"


def is_val(a) -> bool:
    return type(a) is Val


def leq(a, b) -> bool:
    if a == b or a is BOT or b is TOP:
        return True
    if type(a) is Val:
        return b is CHECK
    return False


def join(a, b):
    if leq(a, b):
        return b
    if leq(b, a):
        return a
    if type(a) is Val and type(b) is Val:
        return CHECK
    # any remaining pair mixes the in-purview and out-of-purview branches
    return TOP


def join_all(elems: Iterable):
    acc = BOT
    for e in elems:
        acc = join(acc, e)
        if acc is TOP:
            break
    return acc


def up_set(a) -> list:
    """Lattice elements above ``a``; for ``BOT`` only the markers are listed."""
    if a is BOT:
        return [BOT, CROSS, CHECK, TOP]
    if type(a) is Val:
        return [a, CHECK, TOP]
    if a is CHECK:
        return [CHECK, TOP]
    if a is CROSS:
        return [CROSS, TOP]
    return [TOP]


# -- value spaces and abstractions ------------------------------------------


@dataclass(frozen=True)
class ValueSpace:
    """Descriptor of an abstract value set X.

    ``contains`` decides membership in the (possibly infinite) set; ``values``
    is the bounded enumeration used for exhaustive checks.
    """

    name: str
    values: tuple
    contains: Callable[[Any], bool]
    show: Callable[[Any], str] = repr

    def __iter__(self):
        return iter(self.values)


class Abstraction:
    """An abstraction ``⟨X, π⟩``.

    ``pi`` maps a heap to a raw abstract value or ``CROSS``.  ``witness``
    (optional) returns the subheap ``pi`` inspected on an in-purview heap.
    ``realize`` and ``mutate`` are generator hints: ``realize(x, count, rng)``
    lists minimal heaps projecting to ``x`` and ``mutate(h)`` lists
    near-miss corruptions of such a heap.  ``gen_values`` are the values the
    heap generator realizes (defaults to the space's enumeration).
    """

    def __init__(self, name: str, space: ValueSpace, pi: Callable[[Heap], Any],
                 witness: Optional[Callable[[Heap], Optional[Heap]]] = None,
                 realize: Optional[Callable] = None, mutate: Optional[Callable] = None,
                 gen_values: Optional[Sequence] = None, parts: Optional[tuple] = None):
        self.name = name
        self.space = space
        self.pi = pi
        self.witness = witness
        self.realize = realize
        self.mutate = mutate
        self.gen_values = tuple(gen_values) if gen_values is not None else None
        self.parts = parts

    def project(self, h: Heap):
        x = self.pi(h)
        return CROSS if x is CROSS else Val(x)

    def in_purview(self, h: Heap) -> bool:
        return self.pi(h) is not CROSS

    def generation_values(self) -> tuple:
        return self.gen_values if self.gen_values is not None else self.space.values

    def __repr__(self) -> str:
        return f"Abstraction({self.name})"


def project(A: Abstraction, h: Heap):
    return A.project(h)


def alpha(A: Abstraction, heaps: Iterable[Heap]):
    return join_all(A.project(h) for h in heaps)


def gamma_contains(A: Abstraction, a, h: Heap) -> bool:
    return leq(A.project(h), a)


# -- abstract programs ------------------------------------------------------


class AbstractProgram:
    """A function from X to lattice elements, attached to its home domain."""

    def __init__(self, fn: Callable[[Any], Any], domain: Abstraction, name: str = "m"):
        self.fn = fn
        self.domain = domain
        self.name = name

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self) -> str:
        return f"AbstractProgram({self.name} in {self.domain.name})"


def identity(A: Abstraction) -> AbstractProgram:
    return AbstractProgram(Val, A, "id")


def hat(m: AbstractProgram, a):
    """The abstract transformer derived from ``m``."""
    if a is BOT:
        return BOT
    if type(a) is Val:
        return m(a.x)
    return TOP


def check_locality(A: Abstraction, h: Heap, frame: Heap) -> bool:
    if not disjoint(h, frame):
        raise ValueError("frame must be disjoint from the heap")
    x = A.pi(h)
    return x is CROSS or A.pi(union(h, frame)) == x


def check_witness(A: Abstraction, h: Heap) -> bool:
    """On an in-purview heap the witness is a subheap with the same projection."""
    if A.witness is None:
        return True
    x = A.pi(h)
    if x is CROSS:
        return True
    w = A.witness(h)
    return w is not None and is_subheap(w, h) and A.pi(w) == x


# -- isomorphism ------------------------------------------------------------


@dataclass(frozen=True)
class Bijection:
    forward: Callable[[Any], Any]
    inverse: Callable[[Any], Any]
    name: str = "φ"


def identity_bijection() -> Bijection:
    return Bijection(lambda x: x, lambda x: x, "id")


@dataclass
class IsoResult:
    ok: bool
    cases: int
    witness: Optional[Heap] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_iso(A: Abstraction, B: Abstraction, phi: Bijection, heaps: Iterable[Heap],
              values: Optional[Iterable] = None) -> IsoResult:
    """Sampled check that ``phi`` induces ``A ≅ B``.

    Every heap must satisfy ``phi(π_A(h)) = π_B(h)`` (``CROSS`` maps to
    ``CROSS``); ``phi`` and its inverse must round-trip on the sampled
    values, which default to ``A``'s enumeration.
    """
    cases = 0
    for h in heaps:
        cases += 1
        a, b = A.pi(h), B.pi(h)
        fa = CROSS if a is CROSS else phi.forward(a)
        if fa != b:
            return IsoResult(False, cases, h, f"{phi.name}({a!r}) = {fa!r} but π_B = {b!r}")
    for x in (A.space.values if values is None else values):
        cases += 1
        y = phi.forward(x)
        if phi.inverse(y) != x or not B.space.contains(y):
            return IsoResult(False, cases, None, f"round trip fails at {x!r}")
        if phi.forward(phi.inverse(y)) != y:
            return IsoResult(False, cases, None, f"inverse round trip fails at {y!r}")
    return IsoResult(True, cases)


# -- observational equivalence ----------------------------------------------


@dataclass(frozen=True)
class ObsEq:
    """``[Ψ, ∼]``: a scope of heaps and an equivalence on that scope."""

    in_scope: Callable[[Heap], bool]
    equiv: Callable[[Heap, Heap], bool]
    name: str = "∼"


def obs_eq_of(A: Abstraction) -> ObsEq:
    def in_scope(h):
        return A.pi(h) is not CROSS

    def equiv(h1, h2):
        x = A.pi(h1)
        return x is not CROSS and x == A.pi(h2)

    return ObsEq(in_scope, equiv, f"∼{A.name}")


def heap_equality(in_scope: Callable[[Heap], bool]) -> ObsEq:
    return ObsEq(in_scope, lambda h1, h2: h1 == h2, "=")
