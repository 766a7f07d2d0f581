import pytest
from hypothesis import given, settings, strategies as st

from heapcomm.heap import EMPTY, NULL, TRUE, Addr, Bool, Heap, Int, Pair, union
from heapcomm.lang import (
    SKIP, BinOp, Deref, Fail, Footprint, FreshPolicy, Let, Lit, ParseError,
    Skip, UnboundIdentifier, Var, Write, check_local_action, exec_stmt, in_footprint,
    is_sufficient, lift, parse_program, parse_source, seq, transform,
)
from heapcomm.structures import load_source, shipped
from heapcomm.structures.stack import layout

P = 7


def run(text, h, k=2, **env):
    s = parse_program(text, env)
    return exec_stmt(s, h, FreshPolicy(k), {n: Addr(a) for n, a in env.items()})


# -- an independent path-by-path evaluator ------------------------------------

class _Stop(Exception):
    pass


def paths(stmt, h, k=2, env=None):
    """Yield each path's final heap, or None for a failing path.

    Fresh choices are replayed from an explicit choice list, so every path is
    run to completion separately rather than as a set.
    """
    from heapcomm.lang import BinOp, Deref, Free, If, Let, Lit, MkPair, Ref, Seq, UnOp, Var

    def fresh(hh):
        out, a = [], 1
        while len(out) < k:
            if a not in hh:
                out.append(a)
            a += 1
        return out

    def go(choices):
        used = []
        heap = dict(h)

        def pick(opts):
            i = len(used)
            c = choices[i] if i < len(choices) else 0
            used.append((c, len(opts)))
            return opts[c]

        def ev(e, env):
            if isinstance(e, Lit):
                return e.value
            if isinstance(e, Var):
                return env[e.name]
            if isinstance(e, Deref):
                t = ev(e.target, env)
                if not isinstance(t, Addr) or t.index not in heap:
                    raise _Stop
                return heap[t.index]
            if isinstance(e, Ref):
                v = ev(e.init, env)
                a = pick(fresh(heap))
                heap[a] = v
                return Addr(a)
            if isinstance(e, MkPair):
                a = ev(e.fst, env)
                return Pair(a, ev(e.snd, env))
            if isinstance(e, UnOp):
                v = ev(e.arg, env)
                if e.op == "not" and isinstance(v, Bool):
                    return Bool(not v.b)
                if e.op in ("fst", "snd") and isinstance(v, Pair):
                    return v.fst if e.op == "fst" else v.snd
                raise _Stop
            if isinstance(e, BinOp):
                a = ev(e.left, env)
                b = ev(e.right, env)
                if e.op == "=":
                    return Bool(a == b)
                if e.op == "||" and isinstance(a, Bool) and isinstance(b, Bool):
                    return Bool(a.b or b.b)
                if isinstance(a, Int) and isinstance(b, Int) and e.op in "+-<":
                    return {"+": Int(a.n + b.n), "-": Int(a.n - b.n), "<": Bool(a.n < b.n)}[e.op]
                raise _Stop
            raise TypeError(e)

        def ex(s, env):
            if isinstance(s, Skip):
                return
            if isinstance(s, Fail):
                raise _Stop
            if isinstance(s, Seq):
                ex(s.first, env)
                ex(s.second, env)
            elif isinstance(s, Let):
                v = ev(s.expr, env)
                ex(s.body, {**env, s.name: v})
            elif isinstance(s, If):
                c = ev(s.cond, env)
                if not isinstance(c, Bool):
                    raise _Stop
                ex(s.then if c.b else s.orelse, env)
            elif isinstance(s, Write):
                t = ev(s.target, env)
                v = ev(s.value, env)
                if not isinstance(t, Addr) or t.index not in heap:
                    raise _Stop
                heap[t.index] = v
            elif isinstance(s, Free):
                t = ev(s.target, env)
                if not isinstance(t, Addr) or t.index not in heap:
                    raise _Stop
                del heap[t.index]

        try:
            ex(stmt, dict(env or {}))
            result = Heap(heap)
        except _Stop:
            result = None
        return result, used

    stack = [[]]
    while stack:
        choices = stack.pop()
        result, used = go(choices)
        yield result
        # branch on every choice point past the given prefix
        for i in range(len(choices), len(used)):
            _, n = used[i]
            for c in range(1, n):
                stack.append([u for u, _ in used[:i]] + [c])


def oracle_exec(stmt, h, k=2, env=None):
    outs = list(paths(stmt, h, k, env))
    if any(o is None for o in outs):
        return frozenset()
    return frozenset(outs)


# -- parsing -----------------------------------------------------------------


def test_parse_incr_literal_address():
    s = parse_program("let c = !7 in let i = c + 1 in 7 <- i")
    assert s == Let("c", Deref(Lit(Addr(7))),
                    Let("i", BinOp("+", Var("c"), Lit(Int(1))), Write(Lit(Addr(7)), Var("i"))))


def test_parse_skip_and_unbound():
    assert parse_program("skip") == Skip()
    with pytest.raises(UnboundIdentifier) as e:
        parse_program("let x = !y in skip")
    assert e.value.name == "y"


def test_parse_errors_have_position():
    with pytest.raises(ParseError) as e:
        parse_program("let x = in skip")
    assert e.value.line == 1 and e.value.col > 1
    with pytest.raises(ParseError):
        parse_program("skip;\n  if")


def test_shipped_sources_parse():
    for name in ("incr", "decr", "read", "add", "rem", "mem", "push", "pop", "peek"):
        params, stmt = load_source(name)
        assert params
        assert parse_source(f"#! params: {' '.join(params)}\n" + "skip")[0] == params


# -- evaluation --------------------------------------------------------------


def test_exec_examples():
    incr = "let c = !p in let i = c + 1 in p <- i"
    assert run(incr, Heap({P: 3}), p=P) == {Heap({P: 4})}
    assert exec_stmt(Fail(), Heap({1: 0})) == frozenset()
    assert run("let q = ref 0 in skip", EMPTY, k=2) == {Heap({1: 0}), Heap({2: 0})}


def test_lifted_examples():
    assert lift(Skip())(Heap({1: 2})) == {Heap({1: 2})}
    decr = shipped("decr", (P,))
    assert decr(Heap({P: 0})) == {Heap({P: 0})}
    pop = shipped("pop", (13, 1))
    empty_stack = Heap({13: NULL, 1: 5})
    assert pop(empty_stack) == frozenset()
    assert not is_sufficient(pop, empty_stack)


def test_failures_are_empty():
    assert run("let x = !p in skip", EMPTY, p=5) == frozenset()
    assert run("p <- 1", EMPTY, p=5) == frozenset()
    assert run("free p", EMPTY, p=5) == frozenset()
    assert run("let x = fst 3 in skip", EMPTY) == frozenset()
    assert run("let x = 1 + true in skip", EMPTY) == frozenset()
    assert run("if 1 then skip else skip", EMPTY) == frozenset()


def test_demonic_failure_on_one_branch():
    # the second fresh choice lands on an address whose read fails
    text = "let q = ref 0 in if q = @1 then skip else let x = !@9 in skip"
    assert run(text, EMPTY) == frozenset()
    assert run(text, EMPTY, k=1) == {Heap({1: 0})}


def test_transform_examples():
    incr = shipped("incr", (P,))
    assert transform(incr, [Heap({P: 1}), Heap({P: 2})]) == {Heap({P: 2}), Heap({P: 3})}
    assert transform(incr, []) == frozenset()
    pop = shipped("pop", (13, 1))
    full = union(layout(13, (Int(1),), [20]), Heap({1: 0}))
    assert pop(full)
    assert transform(pop, [full, Heap({13: NULL, 1: 0})]) == frozenset()


def test_seq_examples():
    incr = shipped("incr", (P,))
    assert seq(incr, incr)(Heap({P: 0})) == {Heap({P: 2})}
    g = shipped("decr", (P,))
    for n in range(4):
        assert seq(SKIP, g)(Heap({P: n})) == g(Heap({P: n}))


def test_sufficiency():
    incr = shipped("incr", (P,))
    assert is_sufficient(incr, Heap({P: 3}))
    assert not is_sufficient(incr, EMPTY)


def test_footprint_examples():
    incr = shipped("incr", (P,))
    decr = shipped("decr", (P,))
    assert in_footprint(incr, Heap({P: 3})) == Footprint.YES
    assert in_footprint(incr, EMPTY) == Footprint.NO
    assert in_footprint(decr, Heap({P: Pair(Int(0), Int(0))})) == Footprint.YES
    assert in_footprint(decr, Heap({P: Pair(Int(0), Int(0))}), strict=True) == Footprint.UNKNOWN


def test_local_action_examples():
    incr = shipped("incr", (P,))
    assert check_local_action(incr, Heap({P: 1}), Heap({9: 0}))
    assert check_local_action(incr, EMPTY, Heap({9: 0}))
    push = shipped("push", (13, 1))
    h = union(Heap({13: NULL}), Heap({1: 5}))
    assert check_local_action(push, h, Heap({9: 0}))
    assert check_local_action(push, h, Heap({2: 0, 3: 1}))
    with pytest.raises(ValueError):
        check_local_action(incr, Heap({P: 1}), Heap({P: 2}))


def test_push_two_fresh_choices():
    push = shipped("push", (13, 1))
    out = push(Heap({13: NULL, 1: 5}))
    assert len(out) == 2
    assert {k[13] for k in out} == {Addr(2), Addr(3)}


# -- property checks against the path oracle ----------------------------------

atoms = st.sampled_from([
    "skip", "fail", "free x", "x <- 0", "x <- y", "let z = !x in skip",
    "let q = ref 1 in skip", "let q = ref x in q <- 2", "let q = ref 0 in free q",
    "let z = !x in if z = 0 then fail else skip", "let z = !y in x <- (z, z)",
    "let q = ref 0 in let r = ref 1 in if q < r then skip else fail",
    "let z = !x in let w = fst z in skip",
    "let z = !x in let w = z + 1 in x <- w",
])
programs = st.lists(atoms, min_size=1, max_size=4).map(" ; ".join)
cell_values = st.sampled_from([Int(0), Int(1), NULL, Pair(Int(0), NULL), TRUE, Addr(2)])
heaps = st.dictionaries(st.sampled_from([1, 2, 3, 5]), cell_values, max_size=4).map(Heap)
ENV = {"x": Addr(1), "y": Addr(2)}


@settings(max_examples=400, deadline=None)
@given(programs, heaps, st.integers(1, 3))
def test_exec_matches_path_oracle(text, h, k):
    s = parse_program(text, ENV)
    assert exec_stmt(s, h, FreshPolicy(k), ENV) == oracle_exec(s, h, k, ENV)


@settings(max_examples=200, deadline=None)
@given(programs, programs, programs, heaps)
def test_seq_associative(a, b, c, h):
    f, g, k = (lift(parse_program(t, ENV), ENV) for t in (a, b, c))
    assert seq(f, seq(g, k))(h) == seq(seq(f, g), k)(h)


@settings(max_examples=200, deadline=None)
@given(programs, st.lists(heaps, max_size=3), st.lists(heaps, max_size=3))
def test_transform_distributes(text, c1, c2):
    f = lift(parse_program(text, ENV), ENV)
    left, right = transform(f, c1), transform(f, c2)
    if (left or not c1) and (right or not c2):
        assert transform(f, c1 + c2) == left | right
    else:
        assert transform(f, c1 + c2) == frozenset()


@settings(max_examples=300, deadline=None)
@given(programs, heaps, heaps)
def test_local_action_for_random_programs(text, h, extra):
    f = lift(parse_program(text, ENV), ENV, FreshPolicy(2))
    frame = Heap({a + 30: v for a, v in extra.items()})
    assert check_local_action(f, h, frame)


def test_exec_terminates_on_large_straight_line():
    text = " ; ".join(["let z = !x in let w = z + 1 in x <- w"] * 60)
    out = run(text, Heap({1: 0}), x=1)
    assert out == {Heap({1: 60})}
