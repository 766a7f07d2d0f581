"""Bounded checkers for soundness, capture and commutativity.

Every universally quantified claim is replaced by iteration over finite,
caller-supplied samples (heap sets, heaps, frames, abstract values).  A
``Verdict`` records how many cases were examined and, on failure, a
counterexample that can be replayed directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Iterable, Optional, Sequence

from .compose import conj_domain
from .domain import (
    BOT,
    CROSS,
    AbstractProgram,
    Abstraction,
    ObsEq,
    alpha,
    gamma_contains,
    hat,
    is_val,
    leq,
    obs_eq_of,
    up_set,
)
from .heap import Heap, disjoint, subtract, union
from .lang import ConcreteProgram, Footprint, FootprintBound, in_footprint, transform

VACUOUS_NOTE = "vacuously true — purview empty within bounds"


class Status(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    VACUOUS = "vacuous-pass"


@dataclass
class Verdict:
    status: Status
    cases: int = 0
    counterexample: Optional[dict] = None
    note: str = ""
    bounds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is not Status.FAIL

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        head = {Status.PASS: "PASS", Status.FAIL: "FAIL", Status.VACUOUS: "VACUOUS PASS"}[self.status]
        out = f"{head} ({self.cases} cases)"
        if self.note:
            out += f": {self.note}"
        return out


def _fail(cases: int, **cex) -> Verdict:
    return Verdict(Status.FAIL, cases, cex)


def _done(cases: int, seen_any: bool, note: str = "") -> Verdict:
    if not seen_any:
        return Verdict(Status.VACUOUS, cases, note=VACUOUS_NOTE)
    return Verdict(Status.PASS, cases, note=note)


# -- soundness and capture ----------------------------------------------------


def check_soundness(A: Abstraction, m: AbstractProgram, f: ConcreteProgram,
                    sets: Iterable[Iterable[Heap]]) -> Verdict:
    """``m`` soundly abstracts ``f`` on every sampled heap set.

    (1) ``α(f̄(C)) ≤ m̂(x)`` for every ``x`` above ``α(C)``;
    (2) if ``α(C)`` is a proper value and ``f`` fails on ``C``, ``m`` fails too.
    """
    cases = 0
    seen = False
    for C in sets:
        C = frozenset(C)
        cases += 1
        a = alpha(A, C)
        out = transform(f, C)
        lhs = alpha(A, out)
        for x in up_set(a):
            rhs = hat(m, x)
            if not leq(lhs, rhs):
                return _fail(cases, condition=1, inputs=C, above=x, observed=lhs, expected=rhs)
        if is_val(a):
            seen = True
            if not out and hat(m, a) is not BOT:
                return _fail(cases, condition=2, inputs=C, observed=BOT, expected=hat(m, a))
    return _done(cases, seen)


def image_within(A: Abstraction, m: AbstractProgram, xs: Optional[Iterable] = None) -> bool:
    """``m`` maps every enumerated value into ``X ∪ {⊥}``."""
    for x in (A.space.values if xs is None else xs):
        r = m(x)
        if r is BOT:
            continue
        if not (is_val(r) and A.space.contains(r.x)):
            return False
    return True


def check_capture(A: Abstraction, f: ConcreteProgram, heaps: Iterable[Heap],
                  frames: Sequence[Heap] = (), bound: FootprintBound = FootprintBound(),
                  sound: Optional[AbstractProgram] = None) -> Verdict:
    """``A`` captures ``f`` on the in-purview sampled heaps.

    (1) ``h`` is in ``f``'s footprint (bounded); (2) if ``f`` succeeds, its
    outcomes project to a single value; (3) running under a frame and
    removing the frame's domain gives the same abstraction.  Passing a
    program ``sound`` that was already checked sound with image inside
    ``X ∪ {⊥}`` discharges (1) and (2).
    """
    shortcut = sound is not None and image_within(A, sound)
    cases = 0
    seen = False
    for h in heaps:
        if A.pi(h) is CROSS:
            continue
        seen = True
        cases += 1
        out = f(h)
        if not shortcut:
            if in_footprint(f, h, bound) != Footprint.YES:
                return _fail(cases, condition=1, heap=h)
            if out and not is_val(alpha(A, out)):
                return _fail(cases, condition=2, heap=h, observed=alpha(A, out))
        base = alpha(A, out)
        for fr in frames:
            if not fr or not disjoint(h, fr):
                continue
            cases += 1
            framed = frozenset(subtract(k, fr) for k in f(union(h, fr)))
            got = alpha(A, framed)
            if got != base:
                return _fail(cases, condition=3, heap=h, frame=fr, observed=got, expected=base)
    return _done(cases, seen, "conditions 1-2 discharged by soundness" if shortcut else "")


def check_capture_obseq(A: Abstraction, obs: ObsEq, heaps: Iterable[Heap],
                        max_pairs: int = 200_000) -> Verdict:
    """``A`` captures ``[Ψ, ∼]``: in-scope heaps are in purview, and equal projections imply ``∼``."""
    scoped = [h for h in heaps if obs.in_scope(h)]
    if not scoped:
        return Verdict(Status.VACUOUS, 0, note=VACUOUS_NOTE)
    cases = 0
    groups: dict = {}
    for h in scoped:
        cases += 1
        x = A.pi(h)
        if x is CROSS:
            return _fail(cases, condition=1, heap=h)
        groups.setdefault(x, []).append(h)
    for x, g in groups.items():
        for h1, h2 in combinations(g, 2):
            cases += 1
            if not obs.equiv(h1, h2):
                return _fail(cases, condition=2, pair=(h1, h2), value=x)
            if cases >= max_pairs:
                return Verdict(Status.PASS, cases, note="pair budget reached")
    return Verdict(Status.PASS, cases)


def check_galois(A: Abstraction, sets: Iterable[Iterable[Heap]], elems: Sequence) -> Verdict:
    """``α(C) ≤ a`` iff every member of ``C`` lies in ``γ(a)``."""
    cases = 0
    for C in sets:
        C = list(C)
        ac = alpha(A, C)
        for a in elems:
            cases += 1
            if leq(ac, a) != all(gamma_contains(A, a, h) for h in C):
                return _fail(cases, inputs=frozenset(C), element=a, alpha=ac)
    return Verdict(Status.PASS, cases)


def check_locality_all(A: Abstraction, heaps: Iterable[Heap], frames: Sequence[Heap]) -> Verdict:
    cases = 0
    seen = False
    for h in heaps:
        x = A.pi(h)
        if x is CROSS:
            continue
        seen = True
        for fr in frames:
            if not disjoint(h, fr):
                continue
            cases += 1
            got = A.pi(union(h, fr))
            if got != x:
                return _fail(cases, heap=h, frame=fr, observed=got, expected=x)
    return _done(cases, seen)


# -- abstract commutativity -------------------------------------------------


@dataclass
class AbstractCondition:
    holds: Callable[[Any], bool]
    description: str
    members: Optional[frozenset] = None
    ordered: Optional[tuple] = None

    def __call__(self, x) -> bool:
        return bool(self.holds(x))


def top_condition() -> AbstractCondition:
    return AbstractCondition(lambda x: True, "⊤")


def commute_outcomes(m: AbstractProgram, n: AbstractProgram, x) -> tuple:
    """``(n̂(m(x)), m̂(n(x)))``."""
    return hat(n, m(x)), hat(m, n(x))


def commutes_at(A: Abstraction, m: AbstractProgram, n: AbstractProgram, x) -> bool:
    r1, r2 = commute_outcomes(m, n, x)
    return r1 == r2 and is_val(r1) and A.space.contains(r1.x)


def abstract_commute(A: Abstraction, m: AbstractProgram, n: AbstractProgram,
                     Q: Callable[[Any], bool], xs: Optional[Iterable] = None) -> Verdict:
    cases = 0
    seen = False
    for x in (A.space.values if xs is None else xs):
        if not Q(x):
            continue
        seen = True
        cases += 1
        if not commutes_at(A, m, n, x):
            r1, r2 = commute_outcomes(m, n, x)
            return _fail(cases, value=x, m_then_n=r1, n_then_m=r2)
    if not seen:
        return Verdict(Status.VACUOUS, cases, note="condition unsatisfied on the enumerated values")
    return Verdict(Status.PASS, cases)


def describe(members: Sequence, xs: Sequence, A: Optional[Abstraction] = None) -> str:
    """A compact printable form of a value set drawn from ``xs``."""
    if not members:
        return "⊥ (never commute)"
    if len(members) == len(xs):
        return "⊤"
    if all(type(x) is int for x in xs):
        return _int_ranges(sorted(members), max(xs))
    show = A.space.show if A is not None else repr
    if len(members) <= 6:
        return "{" + ", ".join(show(x) for x in members) + "}"
    return f"{len(members)} of {len(xs)} values"


def _int_ranges(ns: list, top: int) -> str:
    runs, start, prev = [], ns[0], ns[0]
    for n in ns[1:]:
        if n != prev + 1:
            runs.append((start, prev))
            start = n
        prev = n
    runs.append((start, prev))
    parts = []
    for lo, hi in runs:
        if lo == hi:
            parts.append(f"n = {lo}")
        elif hi == top:
            parts.append(f"n ≥ {lo}" if lo else "⊤")
        else:
            parts.append(f"{lo} ≤ n ≤ {hi}")
    return " ∨ ".join(parts)


def synthesize_abstract_condition(A: Abstraction, m: AbstractProgram, n: AbstractProgram,
                                  xs: Optional[Iterable] = None) -> AbstractCondition:
    """The exact set of enumerated values at which ``m`` and ``n`` commute."""
    xs = list(A.space.values if xs is None else xs)
    ordered = tuple(x for x in xs if commutes_at(A, m, n, x))
    members = frozenset(ordered)
    return AbstractCondition(members.__contains__, describe(ordered, xs, A), members, ordered)


# -- concrete commutativity -------------------------------------------------


@dataclass
class ConcreteCondition:
    holds: Callable[[Heap], bool]
    description: str
    domain: Optional[Abstraction] = None

    def __call__(self, h: Heap) -> bool:
        return bool(self.holds(h))


def concrete_commute(f: ConcreteProgram, g: ConcreteProgram, h: Heap, obs: ObsEq) -> bool:
    """Both orders succeed and every outcome lies in one ``∼``-class."""
    fg = transform(g, f(h))
    if not fg:
        return False
    gf = transform(f, g(h))
    if not gf:
        return False
    outs = list(fg | gf)
    if not all(obs.in_scope(k) for k in outs):
        return False
    return all(obs.equiv(k1, k2) for k1, k2 in combinations(outs, 2))


def derive_concrete_condition(A: Abstraction, Q: Callable[[Any], bool],
                              description: Optional[str] = None) -> ConcreteCondition:
    """``P(h)``: ``h`` projects to a proper value satisfying ``Q``.

    For a local ``A`` this is already upward closed, so it also decides ``P⁺``.
    """

    def holds(h):
        x = A.pi(h)
        return x is not CROSS and bool(Q(x))

    text = description or getattr(Q, "description", "Q")
    return ConcreteCondition(holds, f"π_{A.name}(h) ∈ {{x | {text}}}")


def commutes_under(f: ConcreteProgram, g: ConcreteProgram, P: Callable[[Heap], bool],
                   obs: ObsEq, heaps: Iterable[Heap]) -> Verdict:
    cases = 0
    for h in heaps:
        if not P(h):
            continue
        cases += 1
        if not concrete_commute(f, g, h, obs):
            return _fail(cases, heap=h)
    return _done(cases, cases > 0)


class CaptureNotEstablished(RuntimeError):
    def __init__(self, which: str, verdict: Verdict):
        super().__init__(f"{which} is not captured: {verdict.counterexample}")
        self.verdict = verdict


def noninterference_condition(A: Abstraction, B: Abstraction, f: ConcreteProgram,
                              g: ConcreteProgram, heaps_a: Iterable[Heap],
                              heaps_b: Iterable[Heap], frames: Sequence[Heap] = (),
                              bound: FootprintBound = FootprintBound(),
                              limit: int = 8) -> ConcreteCondition:
    """Commutativity of programs on separate structures.

    Requires ``A`` to capture ``f`` and ``B`` to capture ``g`` (checked on the
    supplied samples); the condition is that both run and the heap splits
    into an ``A`` part and a ``B`` part.
    """
    va = check_capture(A, f, heaps_a, frames, bound)
    if not va:
        raise CaptureNotEstablished(f"{f.name} by {A.name}", va)
    vb = check_capture(B, g, heaps_b, frames, bound)
    if not vb:
        raise CaptureNotEstablished(f"{g.name} by {B.name}", vb)
    AB = conj_domain(A, B, limit=limit)

    def holds(h):
        return bool(f(h)) and bool(g(h)) and AB.pi(h) is not CROSS

    return ConcreteCondition(holds, f"{f.name}, {g.name} sufficient ∧ h ∈ purview({AB.name})", AB)


def check_noninterference(cond: ConcreteCondition, f: ConcreteProgram, g: ConcreteProgram,
                          heaps: Iterable[Heap]) -> Verdict:
    return commutes_under(f, g, cond, obs_eq_of(cond.domain), heaps)


# -- end-to-end validation ----------------------------------------------------


@dataclass
class ConcreteReport:
    """Outcome of running both orders on every generated in-purview heap."""

    satisfying: int = 0
    satisfying_commute: int = 0
    violating: int = 0
    violating_commute: int = 0
    skipped: int = 0
    first_bad: Optional[Heap] = None          # satisfies P but does not commute
    first_loose: Optional[Heap] = None        # violates P but commutes anyway

    @property
    def sound(self) -> bool:
        return self.satisfying_commute == self.satisfying

    @property
    def tight(self) -> bool:
        return self.violating_commute == 0


def validate_concrete(A: Abstraction, f: ConcreteProgram, g: ConcreteProgram,
                      P: Callable[[Heap], bool], heaps: Iterable[Heap],
                      keep: Optional[Callable[[Heap], bool]] = None) -> ConcreteReport:
    obs = obs_eq_of(A)
    rep = ConcreteReport()
    for h in heaps:
        if A.pi(h) is CROSS or (keep is not None and not keep(h)):
            rep.skipped += 1
            continue
        ok = concrete_commute(f, g, h, obs)
        if P(h):
            rep.satisfying += 1
            if ok:
                rep.satisfying_commute += 1
            elif rep.first_bad is None:
                rep.first_bad = h
        else:
            rep.violating += 1
            if ok:
                rep.violating_commute += 1
                if rep.first_loose is None:
                    rep.first_loose = h
    return rep


__all__ = [
    "Status", "Verdict", "VACUOUS_NOTE", "check_soundness", "image_within", "check_capture",
    "check_capture_obseq", "check_galois", "check_locality_all", "AbstractCondition",
    "top_condition", "commute_outcomes", "commutes_at", "abstract_commute", "describe",
    "synthesize_abstract_condition", "ConcreteCondition", "concrete_commute",
    "derive_concrete_condition", "commutes_under", "CaptureNotEstablished",
    "noninterference_condition", "check_noninterference", "ConcreteReport", "validate_concrete",
]
