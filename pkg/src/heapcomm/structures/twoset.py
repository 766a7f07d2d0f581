"""The two-set held in cells p and q, and its equivalence-class twin Setq."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..compose import conj_domain
from ..domain import CROSS, AbstractProgram, Abstraction, Bijection, Val, ValueSpace
from ..heap import FALSE, NULL, TRUE, Heap, Int, Pair, value_key
from .common import SET_P, SET_Q, BOOLS, Op, finite_values, int_alphabet, make_addr, shipped


def show_set(S) -> str:
    return "{" + ", ".join(repr(v) for v in sorted(S, key=value_key)) + "}"


def _slots(h, p, q, T):
    """The pair of values at p and q if both are in T or null, else None."""
    u, v = h.get(p), h.get(q)
    if u is None or v is None:
        return None
    if (u != NULL and u not in T) or (v != NULL and v not in T):
        return None
    return u, v


def make_set_domain(p: int, q: int, T: tuple) -> Abstraction:
    T = frozenset(T)
    members = sorted(T, key=value_key)
    values = tuple(frozenset(c) for r in range(3) for c in combinations(members, r))
    space = ValueSpace("Set", values,
                       lambda S: isinstance(S, frozenset) and len(S) <= 2 and S <= T,
                       show_set)

    def pi(h):
        found = _slots(h, p, q, T)
        if found is None:
            return CROSS
        u, v = found
        if u == v and u != NULL:
            return CROSS
        return frozenset(x for x in (u, v) if x != NULL)

    def witness(h):
        return h.restrict((p, q))

    def realize(S, count, rng):
        elems = sorted(S, key=value_key)
        if not elems:
            orders = [(NULL, NULL)]
        elif len(elems) == 1:
            orders = [(elems[0], NULL), (NULL, elems[0])]
        else:
            orders = [(elems[0], elems[1]), (elems[1], elems[0])]
        return [Heap._wrap({p: u, q: v}) for u, v in orders[:max(1, count)]]

    outside = Int(max((v.n for v in T if type(v) is Int), default=0) + 100)

    def mutate(h):
        u = h[p]
        dup = u if u != NULL else members[0]
        return [Heap._wrap({p: dup, q: dup}),
                Heap._wrap({p: outside, q: h[q]}),
                Heap._wrap({p: u, q: Pair(NULL, NULL)})]

    return Abstraction(f"Set_{p},{q}", space, pi, witness, realize, mutate)


def make_setq_domain(p: int, q: int, T: tuple) -> Abstraction:
    """Values are equivalence classes of two-set heaps, named by a canonical representative."""
    T = frozenset(T)

    def is_member(h):
        found = _slots(h, p, q, T)
        return found is not None and not (found[0] == found[1] and found[0] != NULL)

    def holds_pair(h, u, v):
        # (p ↦ u ∗ q ↦ v)⁺ restricted to valid slots
        return h.get(p) == u and h.get(q) == v

    def equivalent(h1, h2):
        if not (is_member(h1) and is_member(h2)):
            return False
        u, v = h1[p], h1[q]
        return holds_pair(h2, u, v) or holds_pair(h2, v, u)

    def rep(u, v):
        return Heap._wrap({p: u, q: v})

    def canonical(h):
        u, v = h[p], h[q]
        cands = [r for r in (rep(u, v), rep(v, u)) if equivalent(h, r)]
        return min(cands, key=lambda r: (value_key(r[p]), value_key(r[q])))

    def pi(h):
        return canonical(h) if is_member(h) else CROSS

    set_dom = make_set_domain(p, q, T)
    phi = setq_bijection(p, q)
    values = tuple(phi.forward(S) for S in set_dom.space.values)
    space = ValueSpace("Setq", values,
                       lambda r: isinstance(r, Heap) and r.domain == {p, q} and is_member(r)
                       and canonical(r) == r,
                       repr)
    A = Abstraction(f"Setq_{p},{q}", space, pi, lambda h: h.restrict((p, q)),
                    lambda r, c, rng: set_dom.realize(phi.inverse(r), c, rng),
                    set_dom.mutate)
    A.equivalent = equivalent
    return A


def setq_bijection(p: int, q: int) -> Bijection:
    """Value set ↦ canonical representative heap (null padding first, then by value order)."""

    def forward(S):
        elems = sorted(S, key=value_key)
        padded = [NULL] * (2 - len(elems)) + elems
        return Heap._wrap({p: padded[0], q: padded[1]})

    def inverse(r):
        return frozenset(x for x in (r[p], r[q]) if x != NULL)

    return Bijection(forward, inverse, "φ_Setq")


@dataclass
class TwoSetBundle:
    p: int
    q: int
    T: tuple
    domain: Abstraction
    fresh_width: int = 2

    def elem(self, a: int) -> Abstraction:
        return make_addr(a, finite_values("T", self.T))

    def add(self, a: int) -> Op:
        D = conj_domain(self.domain, self.elem(a))

        def fn(x):
            S, v = x
            S2 = S | {v}
            return Val((S2 if len(S2) <= 2 else S, v))

        return Op(f"add_{a}", shipped("add", (self.p, self.q, a), f"add_{a}", self.fresh_width),
                  AbstractProgram(fn, D, f"add^{a}"), (self.p, self.q, a))

    def rem(self, a: int) -> Op:
        D = conj_domain(self.domain, self.elem(a))
        return Op(f"rem_{a}", shipped("rem", (self.p, self.q, a), f"rem_{a}", self.fresh_width),
                  AbstractProgram(lambda x: Val((x[0] - {x[1]}, x[1])), D, f"rem^{a}"),
                  (self.p, self.q, a))

    def mem(self, a: int, r: int) -> Op:
        D = conj_domain(self.domain, self.elem(a), make_addr(r, BOOLS))

        def fn(x):
            S, v, _ = x
            return Val((S, v, TRUE if v in S else FALSE))

        return Op(f"mem_{a}^{r}", shipped("mem", (self.p, self.q, a, r), f"mem_{a}^{r}", self.fresh_width),
                  AbstractProgram(fn, D, f"mem^{a},{r}"), (self.p, self.q, a, r))


def make_twoset(p: int = SET_P, q: int = SET_Q, T: tuple | None = None,
                alphabet: int = 3, fresh_width: int = 2) -> TwoSetBundle:
    T = tuple(T) if T is not None else int_alphabet(alphabet)
    if NULL in T:
        raise ValueError("null cannot be a two-set element")
    return TwoSetBundle(p, q, T, make_set_domain(p, q, T), fresh_width)
