"""The non-negative counter ``Ctr_p``."""

from __future__ import annotations

from dataclasses import dataclass

from ..compose import conj_domain
from ..domain import CROSS, AbstractProgram, Abstraction, Val, ValueSpace
from ..heap import NULL, TRUE, Heap, Int, Pair
from .common import CTR_P, Op, make_addr, nat_values, shipped


def make_ctr_domain(p: int = CTR_P, max_n: int = 32, gen_max: int | None = None) -> Abstraction:
    space = ValueSpace("ℕ", tuple(range(max_n + 1)),
                       lambda n: type(n) is int and n >= 0, str)

    def pi(h):
        v = h.get(p)
        if type(v) is Int and v.n >= 0:
            return v.n
        return CROSS

    def witness(h):
        return h.restrict((p,))

    def realize(n, count, rng):
        return [Heap._wrap({p: Int(n)})]

    def mutate(h):
        n = h[p].n if type(h.get(p)) is Int else 0
        return [Heap._wrap({p: c}) for c in (Int(-1), NULL, TRUE, Pair(Int(n), NULL))]

    gen = range(min(max_n, gen_max) + 1) if gen_max is not None else None
    return Abstraction(f"Ctr_{p}", space, pi, witness, realize, mutate, gen_values=gen)


@dataclass
class CounterBundle:
    p: int
    domain: Abstraction
    max_n: int
    fresh_width: int = 2
    nat_max: int = 3

    def incr(self) -> Op:
        m = AbstractProgram(lambda n: Val(n + 1), self.domain, "incr^")
        return Op("incr", shipped("incr", (self.p,), "incr", self.fresh_width), m, (self.p,))

    def decr(self) -> Op:
        m = AbstractProgram(lambda n: Val(max(0, n - 1)), self.domain, "decr^")
        return Op("decr", shipped("decr", (self.p,), "decr", self.fresh_width), m, (self.p,))

    def read(self, r: int) -> Op:
        D = conj_domain(self.domain, make_addr(r, nat_values(self.nat_max)))
        m = AbstractProgram(lambda x: Val((x[0], Int(x[0]))), D, f"read^{r}")
        return Op(f"read^{r}", shipped("read", (self.p, r), f"read^{r}", self.fresh_width), m,
                  (self.p, r))


def make_ctr(p: int = CTR_P, max_n: int = 32, gen_max: int | None = 6,
             fresh_width: int = 2, nat_max: int = 3) -> CounterBundle:
    return CounterBundle(p, make_ctr_domain(p, max_n, gen_max), max_n, fresh_width, nat_max)
