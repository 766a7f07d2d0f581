"""A stack that tracks its size in a separate counter."""

from __future__ import annotations

from dataclasses import dataclass

from ..compose import conj_program
from ..domain import identity
from ..lang import seq
from .common import Op
from .counter import CounterBundle
from .stack import StackBundle


@dataclass
class CompoundBundle:
    stack: StackBundle
    ctr: CounterBundle

    def cpush(self, a: int) -> Op:
        push, incr = self.stack.push(a), self.ctr.incr()
        return Op(f"cpush_{a}", seq(push.concrete, incr.concrete, f"cpush_{a}"),
                  conj_program(push.abstract, incr.abstract))

    def cpop(self, a: int) -> Op:
        pop, decr = self.stack.pop(a), self.ctr.decr()
        return Op(f"cpop_{a}", seq(pop.concrete, decr.concrete, f"cpop_{a}"),
                  conj_program(pop.abstract, decr.abstract))

    def cpeek(self, a: int) -> Op:
        peek = self.stack.peek(a)
        return Op(f"cpeek_{a}", peek.concrete,
                  conj_program(peek.abstract, identity(self.ctr.domain)))

    def csize(self, r: int) -> Op:
        read = self.ctr.read(r)
        return Op(f"csize_{r}", read.concrete,
                  conj_program(identity(self.stack.domain), read.abstract))


def make_compound(stack: StackBundle, ctr: CounterBundle) -> CompoundBundle:
    return CompoundBundle(stack, ctr)
