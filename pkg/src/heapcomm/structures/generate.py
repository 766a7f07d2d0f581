"""Deterministic heap generators for bounded checks.

Heaps are built from the leaves of a (possibly conjoined) abstraction:
each leaf realizes its part of an abstract value as a minimal heap, the
parts are placed side by side, and junk frames are added on top.  Near-miss
mutants knock one leaf (or one cell) out of purview.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Optional

from ..bounds import Bounds
from ..compose import flatten, leaves
from ..domain import CROSS, Abstraction
from ..heap import EMPTY, NULL, TRUE, Heap, Int, Pair, disjoint, union
from .common import JUNK_ADDRS


class UnsupportedAbstraction(ValueError):
    """The abstraction (or one of its leaves) has no realization hint."""


_JUNK_VALUES = (Int(0), NULL, Int(7), TRUE, Pair(Int(0), NULL))


def junk_frames(bounds: Bounds = Bounds()) -> list:
    """Frames over the junk addresses, the empty frame first."""
    out = [EMPTY]
    addrs = JUNK_ADDRS[:bounds.junk_cells]
    for r in range(1, len(addrs) + 1):
        for cells in combinations(addrs, r):
            for vals in product(_JUNK_VALUES, repeat=r):
                out.append(Heap._wrap(dict(zip(cells, vals))))
    return out


def pick_frames(bounds: Bounds, count: Optional[int] = None) -> list:
    """The empty frame plus an evenly spread selection of junk frames."""
    allf = junk_frames(bounds)
    n = bounds.frames if count is None else count
    if n >= len(allf):
        return allf
    if n <= 1:
        return allf[:1]
    step = (len(allf) - 1) / (n - 1)
    return [allf[round(i * step)] for i in range(n)]


@dataclass(frozen=True)
class Case:
    heap: Heap
    value: object          # the intended abstract value, or CROSS for a mutant
    kind: str              # "base", "framed" or "mutant"


def _layouts(A: Abstraction, x, count: int, rng: random.Random) -> list:
    parts = leaves(A)
    xs = flatten(A, x)
    per = []
    for leaf, xi in zip(parts, xs):
        if leaf.realize is None:
            raise UnsupportedAbstraction(f"{leaf.name} has no generator hint")
        per.append(leaf.realize(xi, count, rng))
    combos = []
    for combo in product(*per):
        ok = all(disjoint(a, b) for a, b in combinations(combo, 2))
        if ok:
            combos.append(list(combo))
    if len(combos) > count:
        rng.shuffle(combos)
        combos = combos[:count]
    return combos


def _join(pieces) -> Heap:
    h = EMPTY
    for p in pieces:
        h = union(h, p)
    return h


def _mutants(A: Abstraction, combo: list) -> Iterator[Heap]:
    parts = leaves(A)
    for i, (leaf, piece) in enumerate(zip(parts, combo)):
        if leaf.mutate is None:
            continue
        others = _join(combo[:i] + combo[i + 1:])
        for m in leaf.mutate(piece):
            if disjoint(m, others):
                yield union(m, others)
    base = _join(combo)
    for a in sorted(base):
        yield base.remove(a)


def generate(A: Abstraction, bounds: Bounds = Bounds(), seed: int = 0,
             frames: Optional[list] = None, mutants: bool = True,
             values: Optional[list] = None) -> list:
    """Generated cases for ``A``.

    Every generation value of ``A`` is realized in up to ``bounds.layouts``
    layouts, each placed under every frame; mutants are derived from the
    first layout of each value.
    """
    rng = random.Random(seed)
    frames = pick_frames(bounds) if frames is None else frames
    out = []
    seen = set()
    vals = A.generation_values() if values is None else values
    for x in vals:
        combos = _layouts(A, x, max(1, bounds.layouts), rng)
        for combo in combos:
            base = _join(combo)
            for f in frames:
                if not disjoint(base, f):
                    continue
                h = union(base, f)
                if h not in seen:
                    seen.add(h)
                    out.append(Case(h, x, "base" if not f else "framed"))
        if mutants and combos:
            for m in _mutants(A, combos[0]):
                if m not in seen:
                    seen.add(m)
                    out.append(Case(m, CROSS, "mutant"))
    return out


def gen_purview_heaps(A: Abstraction, bounds: Bounds = Bounds(), seed: int = 0,
                      mutants: bool = True, frames: Optional[list] = None) -> list:
    return [c.heap for c in generate(A, bounds, seed, frames=frames, mutants=mutants)]


def gen_heap_sets(A: Abstraction, bounds: Bounds = Bounds(), seed: int = 0,
                  heaps: Optional[list] = None) -> list:
    """Finite heap sets for soundness checks.

    All singletons, the empty set, and seeded pairs of three kinds: same
    projection, different projections, and one in-purview with one not.
    """
    rng = random.Random(seed ^ 0x5EED)
    hs = gen_purview_heaps(A, bounds, seed) if heaps is None else list(heaps)
    sets = [frozenset()] + [frozenset((h,)) for h in hs]
    inside = [h for h in hs if A.pi(h) is not CROSS]
    outside = [h for h in hs if A.pi(h) is CROSS]
    by_value: dict = {}
    for h in inside:
        by_value.setdefault(A.pi(h), []).append(h)
    groups = [g for g in by_value.values() if len(g) > 1]
    n = bounds.set_pairs
    for i in range(n):
        kind = i % 3
        if kind == 0 and groups:
            g = rng.choice(groups)
            pair = rng.sample(g, 2)
        elif kind == 1 and len(inside) > 1:
            pair = rng.sample(inside, 2)
        elif kind == 2 and inside and outside:
            pair = [rng.choice(inside), rng.choice(outside)]
        else:
            continue
        sets.append(frozenset(pair))
    return sets
