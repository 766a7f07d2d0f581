"""Abstract conjunction ``A ∗ B`` of domains and ``m ∗ n`` of programs.

A conjunction of ``k`` parts has values ``(x_1, ..., x_k)``; the binary
operator is the ``k = 2`` case, and nesting (``conj_domain(conj_domain(A,
B), C)``) keeps nested tuples.  Splitting a heap into in-purview pieces is
witness-directed when every part supplies a footprint witness and falls back
to bounded enumeration of cell assignments otherwise.
"""

from __future__ import annotations

from itertools import product
from typing import Optional, Sequence

from .domain import (
    BOT,
    CROSS,
    AbstractProgram,
    Abstraction,
    Bijection,
    Val,
    ValueSpace,
    identity,
    join,
)
from .heap import DEFAULT_PARTITION_LIMIT, EMPTY, Heap, PartitionExplosion, subtract, union


def _greedy_split(parts: Sequence[Abstraction], h: Heap, order: Sequence[int]):
    pieces: list = [None] * len(parts)
    values: list = [None] * len(parts)
    rest = h
    for step, i in enumerate(order):
        A = parts[i]
        x = A.pi(rest)
        if x is CROSS:
            return None
        values[i] = x
        if step == len(order) - 1:
            pieces[i] = rest
        else:
            w = A.witness(rest)
            if w is None:
                return None
            pieces[i] = w
            rest = subtract(rest, w)
    return pieces, values


def _enumerated_splits(parts: Sequence[Abstraction], h: Heap, limit: int):
    if len(h) > limit:
        raise PartitionExplosion(f"{len(h)} cells exceeds the partition bound {limit}")
    addrs = sorted(h)
    k = len(parts)
    for assign in product(range(k), repeat=len(addrs)):
        cells = [dict() for _ in range(k)]
        for a, j in zip(addrs, assign):
            cells[j][a] = h[a]
        pieces = [Heap._wrap(c) for c in cells]
        values = []
        for A, piece in zip(parts, pieces):
            x = A.pi(piece)
            if x is CROSS:
                break
            values.append(x)
        else:
            yield pieces, values


def split_pieces(parts: Sequence[Abstraction], h: Heap, limit: int = DEFAULT_PARTITION_LIMIT):
    """A disjoint split of ``h`` into in-purview pieces with their values, or None."""
    if all(A.witness is not None for A in parts):
        n = len(parts)
        found = _greedy_split(parts, h, range(n))
        if found is None and n > 1:
            found = _greedy_split(parts, h, range(n - 1, -1, -1))
        return found
    for found in _enumerated_splits(parts, h, limit):
        return found
    return None


def split_witness(A: Abstraction, B: Abstraction, h: Heap,
                  limit: int = DEFAULT_PARTITION_LIMIT) -> Optional[tuple]:
    found = split_pieces((A, B), h, limit)
    return None if found is None else tuple(found[0])


def all_split_values(A: Abstraction, B: Abstraction, h: Heap,
                     limit: int = DEFAULT_PARTITION_LIMIT) -> set:
    """Projected pairs over every 2-partition of ``h`` (for uniqueness checks)."""
    return {tuple(v) for _, v in _enumerated_splits((A, B), h, limit)}


def _product_space(parts: Sequence[Abstraction]) -> ValueSpace:
    spaces = [A.space for A in parts]

    def contains(x):
        return (isinstance(x, tuple) and len(x) == len(spaces)
                and all(s.contains(c) for s, c in zip(spaces, x)))

    def show(x):
        return "(" + ", ".join(s.show(c) for s, c in zip(spaces, x)) + ")"

    values = tuple(product(*(s.values for s in spaces)))
    return ValueSpace(" × ".join(s.name for s in spaces), values, contains, show)


def conj_domain(*parts: Abstraction, limit: int = DEFAULT_PARTITION_LIMIT) -> Abstraction:
    if len(parts) < 2:
        raise ValueError("a conjunction needs at least two parts")
    parts = tuple(parts)

    def pi(h):
        found = split_pieces(parts, h, limit)
        return CROSS if found is None else tuple(found[1])

    witness = None
    if all(A.witness is not None for A in parts):
        def witness(h):
            found = split_pieces(parts, h, limit)
            if found is None:
                return None
            w = EMPTY
            for A, piece in zip(parts, found[0]):
                w = union(w, A.witness(piece))
            return w

    gen = None
    if all(A.generation_values() is not None for A in parts):
        gen = tuple(product(*(A.generation_values() for A in parts)))
    name = " ∗ ".join(f"({A.name})" if A.parts else A.name for A in parts)
    return Abstraction(name, _product_space(parts), pi, witness, gen_values=gen, parts=parts)


# -- domain trees ------------------------------------------------------------


def leaves(A: Abstraction) -> list:
    if A.parts is None:
        return [A]
    return [leaf for p in A.parts for leaf in leaves(p)]


def flatten(A: Abstraction, x) -> list:
    """Leaf-level values of ``x`` in ``A``'s leaf order."""
    if A.parts is None:
        return [x]
    return [c for p, xi in zip(A.parts, x) for c in flatten(p, xi)]


def assemble(A: Abstraction, flat: Sequence):
    """Inverse of ``flatten``."""
    it = iter(flat)

    def build(D):
        if D.parts is None:
            return next(it)
        return tuple(build(p) for p in D.parts)

    return build(A)


# -- programs -----------------------------------------------------------------


def conj_program(m: AbstractProgram, n: AbstractProgram,
                 domain: Optional[Abstraction] = None) -> AbstractProgram:
    D = domain or conj_domain(m.domain, n.domain)

    def fn(x):
        a, b = x
        ra, rb = m(a), n(b)
        if ra is BOT or rb is BOT:
            return BOT
        if type(ra) is Val and type(rb) is Val:
            return Val((ra.x, rb.x))
        return join(ra, rb)

    return AbstractProgram(fn, D, f"{m.name} ∗ {n.name}")


def embed(m: AbstractProgram, target: Abstraction, name: Optional[str] = None) -> AbstractProgram:
    """Run ``m`` on the leaves of ``target`` that it is defined over.

    This is ``φ ∘ (m ∗ id) ∘ φ⁻¹`` for the leaf permutation ``φ``: leaves
    are matched by name, untouched leaves are framed by the identity.
    """
    src = leaves(m.domain)
    tgt = leaves(target)
    names = [L.name for L in tgt]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate leaves in {target.name}")
    try:
        idx = [names.index(L.name) for L in src]
    except ValueError:
        raise ValueError(f"{m.domain.name} is not a sub-conjunction of {target.name}") from None
    framed = len(idx) < len(tgt)

    def fn(x):
        flat = flatten(target, x)
        r = m(assemble(m.domain, [flat[i] for i in idx]))
        if r is BOT:
            return BOT
        if type(r) is Val:
            out = list(flat)
            for i, c in zip(idx, flatten(m.domain, r.x)):
                out[i] = c
            return Val(assemble(target, out))
        # an imprecise result joined with the identity's Val on the frame
        return join(r, Val(None)) if framed else r

    return AbstractProgram(fn, target, name or m.name)


def swap_bijection() -> Bijection:
    return Bijection(lambda x: (x[1], x[0]), lambda y: (y[1], y[0]), "swap")


def reassoc_bijection() -> Bijection:
    return Bijection(lambda x: (x[0][0], (x[0][1], x[1])),
                     lambda y: ((y[0], y[1][0]), y[1][1]), "reassoc")


def frame_identity(m: AbstractProgram, B: Abstraction) -> AbstractProgram:
    """``m ∗ id`` over ``m.domain ∗ B``."""
    return conj_program(m, identity(B))
