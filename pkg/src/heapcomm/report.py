"""Table regeneration and end-to-end validation of table rows."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .analysis import (
    AbstractCondition,
    ConcreteReport,
    derive_concrete_condition,
    synthesize_abstract_condition,
    validate_concrete,
)
from .bounds import Bounds
from .domain import CROSS
from .structures import SCOPES, TableRow, junk_frames, pick_frames, table
from .structures.generate import generate

NEVER = "never commute"
INCONSISTENT = "condition unsatisfiable by consistent states"


@dataclass
class RowResult:
    row: TableRow
    condition: AbstractCondition
    stated_set: frozenset
    match: bool
    cases: int
    lemma_match: Optional[bool] = None
    flags: list = field(default_factory=list)

    def to_json(self, bounds: Bounds, seed: int) -> dict:
        show = self.row.domain.space.show
        out = {
            "pair": self.row.key,
            "scope": self.row.scope,
            "domain": self.row.domain.name,
            "bounds": bounds.as_dict(),
            "synthesized": self.condition.description,
            "synthesized_set": [show(x) for x in self.condition.ordered],
            "paper_condition_id": self.row.condition_id,
            "paper_condition": self.row.stated_text,
            "match": self.match,
            "cases_checked": self.cases,
            "seed": seed,
        }
        if self.lemma_match is not None:
            out["lemma_match"] = self.lemma_match
        return out


def lemma_condition(row: TableRow) -> frozenset:
    """Conjoin per-component synthesized conditions over the row's value space."""
    parts = []
    for part in row.lemma:
        q = synthesize_abstract_condition(part.domain, part.m, part.n)
        parts.append((part, q.members))
    return frozenset(x for x in row.domain.space.values
                     if all(part.project(row.domain, x) in mem for part, mem in parts))


def analyse_row(row: TableRow) -> RowResult:
    xs = row.domain.space.values
    cond = synthesize_abstract_condition(row.domain, row.m, row.n, xs)
    stated = frozenset(x for x in xs if row.stated_holds(x))
    res = RowResult(row, cond, stated, cond.members == stated, len(xs))
    if row.lemma:
        res.lemma_match = lemma_condition(row) == cond.members
    if not cond.members:
        res.flags.append(NEVER)
    elif row.consistent is not None and not any(row.is_consistent(x) for x in cond.members):
        res.flags.append(INCONSISTENT)
    return res


def parse_scope(scope: str) -> list:
    names = [s.strip() for s in scope.split(",") if s.strip()]
    if not names:
        raise ValueError("empty scope")
    out = []
    for s in names:
        if s == "all":
            out.extend(x for x in SCOPES if x not in out)
        elif s in SCOPES:
            if s not in out:
                out.append(s)
        else:
            raise ValueError(f"unknown scope {s!r}; expected one of all, {', '.join(SCOPES)}")
    return out


def build_report(scope: str = "all", bounds: Bounds = Bounds(), seed: int = 0) -> list:
    return [analyse_row(r) for s in parse_scope(scope) for r in table(s, bounds)]


def report_json(results: list, bounds: Bounds, seed: int) -> str:
    doc = {
        "bounds": bounds.as_dict(),
        "seed": seed,
        "rows": [r.to_json(bounds, seed) for r in results],
        "flags": [{"pair": r.row.key, "scope": r.row.scope, "flag": f}
                  for r in results for f in r.flags],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


def report_text(results: list, bounds: Bounds, seed: int) -> str:
    lines = []
    scope = None
    for r in results:
        if r.row.scope != scope:
            scope = r.row.scope
            if lines:
                lines.append("")
            lines.append(f"== {scope}  ({r.row.domain.name})")
        mark = "match" if r.match else "MISMATCH"
        if r.lemma_match is not None:
            mark += ", lemma " + ("agrees" if r.lemma_match else "DISAGREES")
        flag = f"  [{'; '.join(r.flags)}]" if r.flags else ""
        lines.append(f"  {r.row.key:<14} stated: {r.row.stated_text:<44} "
                     f"synthesized: {r.condition.description}  ({mark}, {r.cases} values){flag}")
    lines.append("")
    lines.append(f"bounds: {', '.join(f'{k}={v}' for k, v in bounds.as_dict().items())}; seed {seed}")
    return "\n".join(lines) + "\n"


# -- concrete validation -----------------------------------------------------


def validation_heaps(row: TableRow, cond, bounds: Bounds = Bounds(), seed: int = 0,
                     target: int = 100, min_frames: int = 2, keep=None) -> list:
    """In-purview heaps for a row, adding junk frames until ``target`` satisfy the condition.

    Large rows get ``min_frames`` frames (the empty frame and one junk
    frame); small rows grow toward all junk frames.
    """
    total = len(junk_frames(bounds))
    base = generate(row.domain, bounds, seed, frames=pick_frames(bounds, 1), mutants=False)
    base = [c for c in base if keep is None or keep(c.heap)]
    n_sat = sum(1 for c in base if c.value is not CROSS and cond(c.value))
    if n_sat == 0:
        frames = min_frames        # nothing to satisfy; more frames only add violating heaps
    else:
        frames = min(max(min_frames, -(-target // n_sat)), total)
    cases = generate(row.domain, bounds, seed, frames=pick_frames(bounds, frames))
    return [c.heap for c in cases]


def validate_row(row: TableRow, bounds: Bounds = Bounds(), seed: int = 0,
                 cond: Optional[AbstractCondition] = None, target: int = 100,
                 consistent_only: bool = False) -> tuple:
    """Run both orders on generated heaps; returns ``(report, condition, heaps)``."""
    cond = cond or synthesize_abstract_condition(row.domain, row.m, row.n)
    P = derive_concrete_condition(row.domain, cond, cond.description)
    keep = None
    if consistent_only and row.consistent is not None:
        def keep(h):
            x = row.domain.pi(h)
            return x is not CROSS and row.is_consistent(x)
    heaps = validation_heaps(row, cond, bounds, seed, target, keep=keep)
    rep: ConcreteReport = validate_concrete(row.domain, row.a.concrete, row.b.concrete, P, heaps, keep)
    return rep, cond, heaps
