from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from heapcomm.analysis import check_galois
from heapcomm.domain import (
    BOT, CHECK, CROSS, TOP, AbstractProgram, Val, alpha, check_iso, check_locality,
    check_witness, gamma_contains, hat, identity_bijection, is_val, join, join_all, leq,
    obs_eq_of, project, up_set,
)
from heapcomm.heap import EMPTY, NULL, Heap, Int, Pair
from heapcomm.structures import (
    CTR_P, STK_L, gen_heap_sets, gen_purview_heaps, junk_frames, make_ctr_domain,
    make_stack_domain,
)
from heapcomm.structures.stack import layout

XS = (0, 1, 2, 3)
ELEMS = [BOT, CHECK, CROSS, TOP] + [Val(x) for x in XS]


def order_oracle(a, b):
    """The order written out region by region."""
    if a == b:
        return True
    if a is BOT or b is TOP:
        return True
    if is_val(a):
        return b is CHECK
    if a is CHECK:
        return b is TOP
    if a is CROSS:
        return b is TOP
    return False


def test_leq_matches_oracle():
    for a, b in product(ELEMS, repeat=2):
        assert leq(a, b) == order_oracle(a, b), (a, b)


def test_leq_examples():
    assert leq(BOT, CROSS)
    assert not leq(Val(3), Val(4))
    assert not leq(Val(3), CROSS) and not leq(CROSS, Val(3))


def test_partial_order_laws():
    for a in ELEMS:
        assert leq(a, a)
    for a, b in product(ELEMS, repeat=2):
        if leq(a, b) and leq(b, a):
            assert a == b
    for a, b, c in product(ELEMS, repeat=3):
        if leq(a, b) and leq(b, c):
            assert leq(a, c)


def test_join_is_least_upper_bound():
    for a, b in product(ELEMS, repeat=2):
        j = join(a, b)
        assert leq(a, j) and leq(b, j)
        for u in ELEMS:
            if leq(a, u) and leq(b, u):
                assert leq(j, u), (a, b, j, u)
        assert join(b, a) == j
    for a, b, c in product(ELEMS, repeat=3):
        assert join(join(a, b), c) == join(a, join(b, c))
    for a in ELEMS:
        assert join(a, a) == a


def test_join_examples():
    assert join(Val(2), Val(2)) == Val(2)
    assert join(Val(2), Val(3)) is CHECK
    assert join(CROSS, Val(2)) is TOP
    assert join(BOT, CROSS) is CROSS


def test_up_set_is_exact():
    for a in ELEMS:
        ups = set(map(repr, up_set(a)))
        want = {repr(b) for b in ELEMS if leq(a, b)}
        if a is BOT:
            want = {repr(b) for b in (BOT, CHECK, CROSS, TOP)}
        assert ups == want


CTR = make_ctr_domain(CTR_P, 32)
STK = make_stack_domain(STK_L)


def test_projection_examples():
    assert project(CTR, Heap({CTR_P: 3, 9: None})) == Val(3)
    assert project(CTR, Heap({CTR_P: (1, 2)})) is CROSS
    a = 20
    assert project(STK, Heap({STK_L: _addr(a), a: Pair(Int(5), NULL)})) == Val((Int(5),))


def _addr(i):
    from heapcomm.heap import Addr
    return Addr(i)


def test_alpha_gamma_examples():
    assert alpha(CTR, []) is BOT
    assert alpha(CTR, [Heap({CTR_P: 2}), Heap({CTR_P: 2, 9: 0})]) == Val(2)
    assert alpha(CTR, [Heap({CTR_P: 2}), Heap({CTR_P: 3})]) is CHECK
    assert gamma_contains(CTR, TOP, Heap({1: 0}))
    assert gamma_contains(CTR, Val(2), Heap({CTR_P: 2}))
    assert not gamma_contains(CTR, CHECK, Heap({CTR_P: (0, 0)}))


def test_hat_examples():
    incr = AbstractProgram(lambda n: Val(n + 1), CTR, "incr^")
    assert hat(incr, BOT) is BOT
    assert hat(incr, Val(1)) == Val(2)
    assert hat(incr, CROSS) is TOP
    assert hat(incr, CHECK) is TOP


def test_project_never_returns_markers():
    for h in gen_purview_heaps(STK):
        r = project(STK, h)
        assert r is CROSS or is_val(r)


def test_galois_connection_counter():
    sets = gen_heap_sets(CTR)
    v = check_galois(CTR, sets, ELEMS)
    assert v.passed and v.cases >= 1000


def test_galois_connection_stack():
    sets = gen_heap_sets(STK)[:400]
    elems = [BOT, CHECK, CROSS, TOP] + [Val(x) for x in STK.space.values[:4]]
    assert check_galois(STK, sets, elems).passed


def test_alpha_and_gamma_monotone():
    heaps = gen_purview_heaps(CTR)
    for a, b in product(ELEMS, repeat=2):
        if leq(a, b):
            for h in heaps:
                if gamma_contains(CTR, a, h):
                    assert gamma_contains(CTR, b, h)
    for i in range(0, len(heaps) - 1, 3):
        small = heaps[i:i + 1]
        big = heaps[i:i + 3]
        assert leq(alpha(CTR, small), alpha(CTR, big))


def test_locality_examples():
    assert check_locality(CTR, Heap({CTR_P: 2}), Heap({9: 0}))
    assert check_locality(CTR, Heap({CTR_P: (0, 0)}), Heap({9: 0}))
    h = layout(STK_L, (Int(1), Int(2)), [20, 21])
    assert check_locality(STK, h, Heap({40: Pair(Int(0), NULL)}))
    with pytest.raises(ValueError):
        check_locality(CTR, Heap({CTR_P: 2}), Heap({CTR_P: 0}))


@pytest.mark.parametrize("A", [CTR, STK], ids=lambda A: A.name)
def test_witness_agrees_with_projection(A):
    heaps = gen_purview_heaps(A)
    for h in heaps:
        assert check_witness(A, h)
        fr = junk_frames()[7]
        if A.pi(h) is not CROSS and not (h.domain & fr.domain):
            assert check_locality(A, h, fr)


def test_projection_is_order_independent():
    for h in gen_purview_heaps(STK):
        flipped = Heap(dict(reversed(list(h.items()))))
        assert STK.pi(flipped) == STK.pi(h)


def test_iso_examples():
    heaps = gen_purview_heaps(CTR)
    assert check_iso(CTR, CTR, identity_bijection(), heaps)
    other = make_ctr_domain(CTR_P + 1, 32)
    r = check_iso(CTR, other, identity_bijection(), [Heap({CTR_P: 1})])
    assert not r.ok and r.witness == Heap({CTR_P: 1})


def test_obs_eq_examples():
    obs = obs_eq_of(STK)
    s = (Int(5), Int(7))
    h1, h2 = layout(STK_L, s, [20, 21]), layout(STK_L, s, [25, 22])
    assert h1 != h2 and obs.equiv(h1, h2)
    assert obs.equiv(h1, h1)
    ctr = obs_eq_of(CTR)
    assert not ctr.equiv(Heap({CTR_P: 2}), Heap({CTR_P: 3}))
    assert not ctr.in_scope(EMPTY)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(gen_purview_heaps(STK)), min_size=3, max_size=3))
def test_obs_eq_is_equivalence(hs):
    obs = obs_eq_of(STK)
    a, b, c = hs
    if all(obs.in_scope(h) for h in hs):
        assert obs.equiv(a, a)
        assert obs.equiv(a, b) == obs.equiv(b, a)
        if obs.equiv(a, b) and obs.equiv(b, c):
            assert obs.equiv(a, c)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(ELEMS), max_size=5))
def test_join_all_is_fold(elems):
    acc = BOT
    for e in elems:
        acc = join(acc, e)
    assert join_all(elems) == acc
