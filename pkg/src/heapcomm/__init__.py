"""Commutativity conditions for heap programs from abstract domains."""

from .bounds import Bounds
from .compose import conj_domain, conj_program, embed
from .domain import (BOT, CHECK, CROSS, TOP, AbstractProgram, Abstraction, Val, alpha,
                     gamma_contains, hat, join, leq, obs_eq_of, project)
from .heap import EMPTY, NULL, Addr, Bool, Heap, Int, Pair, union, subtract, disjoint, satisfies
from .lang import ConcreteProgram, lift, parse_program, seq, transform

__version__ = "0.1.0"
