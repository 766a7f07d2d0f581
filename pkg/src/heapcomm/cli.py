"""Command-line front end: ``heapcomm check|commute|report``.

Exit status is 0 for a pass (including a vacuous pass), 1 for a failing
check and 2 for a usage error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import click

from . import analysis as an
from .bounds import Bounds
from .domain import BOT, CHECK, CROSS, TOP, Val, check_iso, identity_bijection
from .lang import FootprintBound, ParseError, parse_source
from .report import build_report, parse_scope, report_json, report_text, validate_row
from .structures import (
    ARG_A,
    CTR_P,
    OUT_R,
    SET_P,
    SET_Q,
    STK_L,
    Op,
    find_row,
    gen_heap_sets,
    gen_purview_heaps,
    junk_frames,
    make_compound,
    make_ctr,
    make_setq_domain,
    make_stack,
    make_twoset,
    pick_frames,
    setq_bijection,
)
from .structures.common import bind


@dataclass
class Bundle:
    name: str
    domain: object
    ops: dict            # op name -> () -> Op
    alphabet: tuple = ()


def bundles(b: Bounds) -> dict:
    ctr = make_ctr(CTR_P, b.counter_max, b.gen_counter_max, b.fresh_width, b.nat_max)
    ts = make_twoset(SET_P, SET_Q, alphabet=b.set_alphabet, fresh_width=b.fresh_width)
    st = make_stack(STK_L, k=b.stack_alphabet, max_depth=b.stack_depth, fresh_width=b.fresh_width)
    cb = make_compound(st, ctr)
    out = {
        "ctr": Bundle("ctr", ctr.domain, {
            "incr": ctr.incr, "decr": ctr.decr, "read": lambda: ctr.read(OUT_R)}),
        "twoset": Bundle("twoset", ts.domain, {
            "add": lambda: ts.add(ARG_A), "rem": lambda: ts.rem(ARG_A),
            "mem": lambda: ts.mem(ARG_A, OUT_R)}),
        "stk": Bundle("stk", st.domain, {
            "push": lambda: st.push(ARG_A), "pop": lambda: st.pop(ARG_A),
            "peek": lambda: st.peek(ARG_A)}),
        "compound": Bundle("compound", None, {
            "cpush": lambda: cb.cpush(ARG_A), "cpop": lambda: cb.cpop(ARG_A),
            "cpeek": lambda: cb.cpeek(ARG_A), "csize": lambda: cb.csize(OUT_R)}),
        "twoset-setq": Bundle("twoset-setq", ts.domain, {}, ts.T),
    }
    out["stack"] = out["stk"]
    return out


def _usage(msg: str):
    raise click.UsageError(msg)


def _bounds(text: Optional[str]) -> Bounds:
    try:
        return Bounds.parse(text)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--bounds")


def _resolve_op(all_bundles: dict, bundle: Bundle, name: str) -> tuple:
    """``(op, owned)``; ``owned`` is False when the op comes from another bundle."""
    if name in bundle.ops:
        return bundle.ops[name](), True
    for other in all_bundles.values():
        if name in other.ops:
            return other.ops[name](), False
    known = sorted({o for bd in all_bundles.values() for o in bd.ops})
    _usage(f"unknown op {name!r}; expected one of {', '.join(known)}")


def _custom_program(path: str, op: Op, b: Bounds):
    try:
        params, stmt = parse_source(Path(path).read_text("utf-8"))
    except OSError as e:
        _usage(f"cannot read {path}: {e}")
    except ParseError as e:
        _usage(f"{path}: {e}")
    if len(params) != len(op.args):
        _usage(f"{path} declares {len(params)} parameters, {op.name} binds {len(op.args)}")
    return bind(stmt, params, op.args, Path(path).stem, b.fresh_width)


def _fmt(v) -> str:
    if isinstance(v, (frozenset, set)) and v and all(hasattr(h, "domain") for h in v):
        return "{" + ", ".join(sorted(repr(h) for h in v)) + "}"
    return repr(v)


def _emit(verdict: an.Verdict, fmt: str, title: str, b: Bounds, seed: int, extra: dict = None):
    if fmt == "json":
        doc = {"check": title, "status": verdict.status.value, "cases": verdict.cases,
               "note": verdict.note, "bounds": b.as_dict(), "seed": seed}
        if verdict.counterexample:
            doc["counterexample"] = {k: _fmt(v) for k, v in verdict.counterexample.items()}
        doc.update(extra or {})
        click.echo(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        click.echo(f"{title}: {verdict.summary()}")
        if verdict.status is an.Status.VACUOUS:
            click.echo("  !! VACUOUS: nothing in the generated samples exercised this check")
        for k, v in (verdict.counterexample or {}).items():
            click.echo(f"  {k}: {_fmt(v)}")
        for k, v in (extra or {}).items():
            click.echo(f"  {k}: {v}")
        click.echo(f"  bounds: {', '.join(f'{k}={v}' for k, v in b.as_dict().items())}; seed {seed}")
    sys.exit(0 if verdict.passed else 1)


_seed = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
_bounds_opt = click.option("--bounds", "bounds_text", default=None, metavar="KEY=VAL,...",
                           help="Override enumeration bounds.")
_format = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                       show_default=True)


@click.group()
def main():
    """Check soundness, capture and commutativity conditions for heap programs."""


@main.command()
@click.argument("target", type=click.Choice(["soundness", "capture", "locality", "galois", "iso"]))
@click.option("--bundle", required=True,
              type=click.Choice(["ctr", "twoset", "stk", "stack", "compound", "twoset-setq"]))
@click.option("--op", "op_name", default=None, help="Operation within (or outside) the bundle.")
@click.option("--program", default=None, type=click.Path(dir_okay=False),
              help="ℒ source replacing the op's concrete program.")
@_bounds_opt
@_seed
@_format
def check(target, bundle, op_name, program, bounds_text, seed, fmt):
    """Run a bounded check over one example bundle."""
    b = _bounds(bounds_text)
    allb = bundles(b)
    bd = allb[bundle]
    op, owned = (None, True)
    if op_name:
        op, owned = _resolve_op(allb, bd, op_name)
    elif target in ("soundness", "capture"):
        _usage(f"check {target} needs --op")
    f = op.concrete if op else None
    if program:
        if op is None:
            _usage("--program needs --op")
        f = _custom_program(program, op, b)
    A = op.domain if (op is not None and owned) else bd.domain
    if A is None:
        _usage(f"bundle {bundle} has no standalone domain; pass --op")
    title = f"{target} {bundle}" + (f"/{op_name}" if op_name else "")

    if target == "soundness":
        if not owned:
            _usage(f"{op_name} has no abstract counterpart in bundle {bundle}")
        v = an.check_soundness(A, op.abstract, f, gen_heap_sets(A, b, seed))
        _emit(v, fmt, title, b, seed, {"domain": A.name})
    if target == "capture":
        heaps = gen_purview_heaps(A, b, seed)
        frames = [fr for fr in pick_frames(b) if fr]
        v = an.check_capture(A, f, heaps, frames, FootprintBound(b.footprint_cells))
        _emit(v, fmt, title, b, seed, {"domain": A.name})
    if target == "locality":
        v = an.check_locality_all(A, gen_purview_heaps(A, b, seed), junk_frames(b))
        _emit(v, fmt, title, b, seed, {"domain": A.name})
    if target == "galois":
        sample = [Val(x) for x in A.space.values[:4]]
        v = an.check_galois(A, gen_heap_sets(A, b, seed), [BOT, CHECK, CROSS, TOP] + sample)
        _emit(v, fmt, title, b, seed, {"domain": A.name})
    # iso
    if bundle == "twoset-setq":
        Q = make_setq_domain(SET_P, SET_Q, bd.alphabet)
        res = check_iso(bd.domain, Q, setq_bijection(SET_P, SET_Q), gen_purview_heaps(bd.domain, b, seed))
        title = "iso Set ≅ Setq"
    else:
        res = check_iso(A, A, identity_bijection(), gen_purview_heaps(A, b, seed))
    v = an.Verdict(an.Status.PASS if res.ok else an.Status.FAIL, res.cases,
                   None if res.ok else {"heap": res.witness, "detail": res.detail})
    _emit(v, fmt, title, b, seed)


def _load_condition(row, choice: str) -> an.AbstractCondition:
    if choice == "paper":
        return an.AbstractCondition(row.stated_holds, row.stated_text)
    if choice == "synthesize":
        return an.synthesize_abstract_condition(row.domain, row.m, row.n)
    try:
        data = json.loads(Path(choice).read_text("utf-8"))
    except (OSError, ValueError) as e:
        _usage(f"--condition must be paper, synthesize or a JSON file of values: {e}")
    if not isinstance(data, list) or not all(isinstance(s, str) for s in data):
        _usage("a condition file is a JSON list of printed values, as in report's synthesized_set")
    show = row.domain.space.show
    wanted = set(data)
    members = frozenset(x for x in row.domain.space.values if show(x) in wanted)
    unknown = wanted - {show(x) for x in members}
    if unknown:
        _usage(f"values not in {row.domain.name}: {', '.join(sorted(unknown)[:5])}")
    return an.AbstractCondition(members.__contains__, f"custom set of {len(members)} values", members)


@main.command()
@click.argument("level", type=click.Choice(["abstract", "concrete"]))
@click.option("--pair", required=True, help="Two operations, e.g. push,pop.")
@click.option("--condition", "cond_spec", default="paper", show_default=True,
              help="paper, synthesize, or a JSON file listing printed values.")
@_bounds_opt
@_seed
@_format
def commute(level, pair, cond_spec, bounds_text, seed, fmt):
    """Verify (or synthesize) a commutativity condition for a table row."""
    b = _bounds(bounds_text)
    try:
        row = find_row(pair, b)
    except KeyError as e:
        _usage(str(e.args[0]))
    Q = _load_condition(row, cond_spec)
    title = f"commute {level} {row.key} under {Q.description}"
    if level == "abstract":
        if cond_spec == "synthesize":
            v = an.Verdict(an.Status.PASS, len(row.domain.space.values),
                           note="never commute" if not Q.members else "")
            extra = {"synthesized": Q.description, "size": len(Q.members),
                     "matches_stated": Q.members == frozenset(
                         x for x in row.domain.space.values if row.stated_holds(x))}
            _emit(v, fmt, title, b, seed, extra)
        v = an.abstract_commute(row.domain, row.m, row.n, Q)
        _emit(v, fmt, title, b, seed, {"domain": row.domain.name})
    consistent = row.consistent is not None
    rep, _, heaps = validate_row(row, b, seed, Q, consistent_only=consistent)
    extra = {
        "domain": row.domain.name,
        "heaps": len(heaps),
        "satisfying": rep.satisfying,
        "tightness probe": f"{rep.violating_commute} of {rep.violating} non-satisfying "
                           "in-purview heaps still commute",
    }
    if consistent:
        extra["filter"] = "size-consistent heaps only (n = |s|)"
    if rep.first_bad is not None:
        v = an.Verdict(an.Status.FAIL, rep.satisfying + rep.violating, {"heap": rep.first_bad})
    elif rep.satisfying == 0:
        note = an.VACUOUS_NOTE
        if consistent:
            note = "no size-consistent heap satisfies the condition: these operations never commute in practice"
        v = an.Verdict(an.Status.VACUOUS, rep.violating, note=note)
    else:
        v = an.Verdict(an.Status.PASS, rep.satisfying + rep.violating)
    _emit(v, fmt, title, b, seed, extra)


@main.command()
@_format
@click.option("--scope", default="all", show_default=True,
              help="all, or a comma list of nnc, twoset, stack, compound.")
@_bounds_opt
@_seed
def report(fmt, scope, bounds_text, seed):
    """Regenerate the commutativity tables from synthesis."""
    b = _bounds(bounds_text)
    try:
        parse_scope(scope)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--scope")
    results = build_report(scope, b, seed)
    text = report_json(results, b, seed) if fmt == "json" else report_text(results, b, seed)
    click.echo(text, nl=False)
    sys.exit(0 if all(r.match and r.lemma_match is not False for r in results) else 1)


if __name__ == "__main__":
    main()
