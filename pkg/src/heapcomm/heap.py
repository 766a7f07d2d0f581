"""Concrete heaps, values, and decidable separation-logic predicates.

Addresses are plain positive ``int`` keys; address 0 is never allocated so
that ``Null`` can never alias a live cell.  Values are small immutable
tagged objects so that ``Int(1)``, ``Bool(True)`` and ``Addr(1)`` stay
distinct under equality and hashing (Python's ``True == 1`` would
otherwise conflate them).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union


class OverlappingDomains(ValueError):
    """Raised when ``union`` is asked to merge heaps sharing an address."""


class PartitionExplosion(RuntimeError):
    """Raised when a fallback enumeration would exceed the heap-size bound."""


DEFAULT_PARTITION_LIMIT = 8


# -- values -----------------------------------------------------------------


class Value:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Null(Value):
    def __repr__(self) -> str:
        return "null"


NULL = Null()


@dataclass(frozen=True, slots=True)
class Int(Value):
    n: int

    def __repr__(self) -> str:
        return str(self.n)


@dataclass(frozen=True, slots=True)
class Bool(Value):
    b: bool

    def __repr__(self) -> str:
        return "true" if self.b else "false"


@dataclass(frozen=True, slots=True)
class Addr(Value):
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"addresses start at 1, got {self.index}")

    def __repr__(self) -> str:
        return f"@{self.index}"


@dataclass(frozen=True, slots=True)
class Pair(Value):
    fst: Value
    snd: Value

    def __repr__(self) -> str:
        return f"({self.fst!r}, {self.snd!r})"


TRUE = Bool(True)
FALSE = Bool(False)

_TAG_ORDER = {Null: 0, Bool: 1, Int: 2, Addr: 3, Pair: 4}


def value_key(v: Value) -> tuple:
    """Total order on values, used only for canonical printing and sorting."""
    if isinstance(v, Pair):
        return (4, value_key(v.fst), value_key(v.snd))
    if isinstance(v, Int):
        return (2, v.n)
    if isinstance(v, Bool):
        return (1, int(v.b))
    if isinstance(v, Addr):
        return (3, v.index)
    return (0,)


def val(x) -> Value:
    """Coerce plain Python data into a ``Value``.

    ``None`` becomes ``Null``, ``bool`` a ``Bool``, ``int`` an ``Int`` and a
    2-tuple a ``Pair``.  Addresses must be given explicitly as ``Addr(n)``.
    """
    if isinstance(x, Value):
        return x
    if x is None:
        return NULL
    if isinstance(x, bool):
        return Bool(x)
    if isinstance(x, int):
        return Int(x)
    if isinstance(x, tuple) and len(x) == 2:
        return Pair(val(x[0]), val(x[1]))
    raise TypeError(f"cannot convert {x!r} to a heap value")


# -- heaps ------------------------------------------------------------------


class Heap(Mapping):
    """Immutable finite partial map from addresses to values."""

    __slots__ = ("_cells", "_hash")

    def __init__(self, cells: Union[Mapping, Iterable, None] = None):
        raw = dict(cells) if cells is not None else {}
        out = {}
        for a, v in raw.items():
            if isinstance(a, Addr):
                a = a.index
            if not isinstance(a, int) or isinstance(a, bool) or a < 1:
                raise ValueError(f"bad address {a!r}")
            out[a] = val(v)
        self._cells = out
        self._hash = None

    @classmethod
    def _wrap(cls, cells: dict) -> "Heap":
        h = cls.__new__(cls)
        h._cells = cells
        h._hash = None
        return h

    def __getitem__(self, a: int) -> Value:
        return self._cells[a]

    def __iter__(self) -> Iterator[int]:
        return iter(self._cells)

    def __len__(self) -> int:
        return len(self._cells)

    def __contains__(self, a) -> bool:
        return a in self._cells

    def __eq__(self, other) -> bool:
        if isinstance(other, Heap):
            return self._cells == other._cells
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._cells.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{a}↦{v!r}" for a, v in sorted(self._cells.items()))
        return "{" + body + "}"

    @property
    def domain(self) -> frozenset:
        return frozenset(self._cells)

    def set(self, a: int, v) -> "Heap":
        cells = dict(self._cells)
        cells[a] = val(v)
        return Heap._wrap(cells)

    def remove(self, a: int) -> "Heap":
        cells = dict(self._cells)
        del cells[a]
        return Heap._wrap(cells)

    def restrict(self, addrs: Iterable[int]) -> "Heap":
        c = self._cells
        return Heap._wrap({a: c[a] for a in addrs if a in c})

    def values_pool(self) -> set:
        return set(self._cells.values())

    def candidate_values(self) -> set:
        """Stored values, their pair components, and the heap's own addresses."""
        out = {Addr(a) for a in self._cells}
        todo = list(self._cells.values())
        while todo:
            v = todo.pop()
            if v not in out:
                out.add(v)
                if type(v) is Pair:
                    todo += [v.fst, v.snd]
        return out


EMPTY = Heap()


def disjoint(h1: Heap, h2: Heap) -> bool:
    if len(h1) > len(h2):
        h1, h2 = h2, h1
    return not any(a in h2 for a in h1)


def union(h1: Heap, h2: Heap) -> Heap:
    if not disjoint(h1, h2):
        shared = sorted(h1.domain & h2.domain)
        raise OverlappingDomains(f"heaps overlap at {shared}")
    cells = dict(h1._cells)
    cells.update(h2._cells)
    return Heap._wrap(cells)


def subtract(k: Heap, h: Heap) -> Heap:
    """The subheap of ``k`` whose domain is ``dom(k) - dom(h)``."""
    return Heap._wrap({a: v for a, v in k._cells.items() if a not in h})


def is_subheap(h1: Heap, h2: Heap) -> bool:
    return all(a in h2 and h2[a] == v for a, v in h1.items())


def subheaps(h: Heap, limit: int = DEFAULT_PARTITION_LIMIT) -> Iterator[Heap]:
    """All 2^|h| subheaps of ``h``, smallest first."""
    if len(h) > limit:
        raise PartitionExplosion(f"{len(h)} cells exceeds the partition bound {limit}")
    addrs = sorted(h)
    for r in range(len(addrs) + 1):
        for pick in combinations(addrs, r):
            yield h.restrict(pick)


# -- predicates -------------------------------------------------------------


class HeapPredicate:
    """Base class for predicate nodes; evaluate with ``satisfies``."""

    __slots__ = ()

    def __mul__(self, other: "HeapPredicate") -> "Star":
        return Star(self, other)


@dataclass(frozen=True)
class PointsTo(HeapPredicate):
    """``addr ↦ value``; an address given as a non-``Addr`` value never matches."""

    addr: object
    value: Value

    def address(self) -> Optional[int]:
        a = self.addr
        if isinstance(a, Addr):
            return a.index
        if isinstance(a, int) and not isinstance(a, bool) and a >= 1:
            return a
        return None


@dataclass(frozen=True)
class Star(HeapPredicate):
    left: HeapPredicate
    right: HeapPredicate


@dataclass(frozen=True)
class Pure(HeapPredicate):
    """A pure fact: holds on the empty heap iff ``holds`` is true."""

    holds: bool


@dataclass(frozen=True)
class ExistsFinite(HeapPredicate):
    """``∃c ∈ candidates. body(c)``.

    ``candidates`` may be a finite collection or a function of the heap being
    checked; ``None`` means the values occurring in that heap (including pair
    components and its allocated addresses) plus a small constant pool.
    """

    candidates: object
    body: Callable[[Value], HeapPredicate]

    def pool(self, h: Heap) -> list:
        c = self.candidates
        if c is None:
            vals = h.candidate_values() | {NULL, Int(0), Int(1)}
            return sorted(vals, key=value_key)
        if callable(c):
            return list(c(h))
        return list(c)


@dataclass(frozen=True)
class Extension(HeapPredicate):
    """``Ψ⁺``: some subheap satisfies the inner predicate."""

    inner: HeapPredicate


@dataclass(frozen=True)
class Custom(HeapPredicate):
    """An opaque decision procedure with an optional footprint extractor.

    ``footprint(h)`` returns the unique subheap the predicate could hold on
    (or ``None``); without it, matching falls back to subheap enumeration.
    """

    decide: Callable[[Heap], bool]
    footprint: Optional[Callable[[Heap], Optional[Heap]]] = None
    label: str = "custom"


TruePredicate = Custom(lambda h: True, label="true")


def satisfies(pred: HeapPredicate, h: Heap, limit: int = DEFAULT_PARTITION_LIMIT) -> bool:
    return _sat(pred, h, limit)


def _sat(p: HeapPredicate, h: Heap, limit: int) -> bool:
    if isinstance(p, PointsTo):
        a = p.address()
        return a is not None and len(h) == 1 and a in h and h[a] == p.value
    if isinstance(p, Star):
        left, right = p.left, p.right
        if _is_open(left) and not _is_open(right):
            left, right = right, left
        if right is TruePredicate:
            return any(True for _ in _matches(left, h, limit))
        return any(_sat(right, subtract(h, k), limit) for k in _matches(left, h, limit))
    if isinstance(p, Pure):
        return p.holds and len(h) == 0
    if isinstance(p, ExistsFinite):
        return any(_sat(p.body(c), h, limit) for c in p.pool(h))
    if isinstance(p, Extension):
        return any(True for _ in _matches(p.inner, h, limit))
    if isinstance(p, Custom):
        return bool(p.decide(h))
    raise TypeError(f"unknown predicate node {p!r}")


def _is_open(p: HeapPredicate) -> bool:
    # nodes whose matches are expensive to enumerate
    return p is TruePredicate or isinstance(p, Extension) or (isinstance(p, Custom) and p.footprint is None)


def _matches(p: HeapPredicate, h: Heap, limit: int) -> Iterator[Heap]:
    """Yield subheaps ``k ⊑ h`` that satisfy ``p`` (duplicates allowed)."""
    if isinstance(p, PointsTo):
        a = p.address()
        if a is not None and a in h and h[a] == p.value:
            yield h.restrict((a,))
    elif isinstance(p, Star):
        for k1 in _matches(p.left, h, limit):
            rest = subtract(h, k1)
            for k2 in _matches(p.right, rest, limit):
                yield union(k1, k2)
    elif isinstance(p, Pure):
        if p.holds:
            yield EMPTY
    elif isinstance(p, ExistsFinite):
        for c in p.pool(h):
            yield from _matches(p.body(c), h, limit)
    elif isinstance(p, Extension):
        for k in _matches(p.inner, h, limit):
            for extra in subheaps(subtract(h, k), limit):
                yield union(k, extra)
    elif isinstance(p, Custom):
        if p.footprint is not None:
            k = p.footprint(h)
            if k is not None and is_subheap(k, h) and p.decide(k):
                yield k
        else:
            for k in subheaps(h, limit):
                if p.decide(k):
                    yield k
    else:
        raise TypeError(f"unknown predicate node {p!r}")
