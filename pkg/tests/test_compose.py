import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from heapcomm.compose import (
    all_split_values, assemble, conj_domain, conj_program, embed, flatten, frame_identity,
    leaves, reassoc_bijection, split_witness, swap_bijection,
)
from heapcomm.domain import (
    BOT, CHECK, CROSS, TOP, AbstractProgram, Abstraction, Val, check_iso, check_locality,
    identity, obs_eq_of,
)
from heapcomm.heap import NULL, Heap, Int, PartitionExplosion, union
from heapcomm.structures import (
    CTR_P, STK_L, gen_purview_heaps, junk_frames, make_addr, make_ctr, make_ctr_domain,
    make_stack, nat_values,
)
from heapcomm.structures.stack import layout

R = 3
CTR = make_ctr_domain(CTR_P, 32)
ADDR = make_addr(R, nat_values(9))
STACK = make_stack()
STK = STACK.domain


def no_witness(A):
    """The same abstraction with its footprint witness removed."""
    return Abstraction(A.name + "'", A.space, A.pi, None, A.realize, A.mutate)


def test_conj_domain_unique_split():
    D = conj_domain(CTR, ADDR)
    assert D.project(Heap({CTR_P: 2, R: 9})) == Val((2, Int(9)))


def test_conj_domain_same_cell_twice_is_cross():
    D = conj_domain(CTR, CTR)
    E = conj_domain(no_witness(CTR), no_witness(CTR))
    for h in [Heap({CTR_P: 2}), Heap({CTR_P: 2, 5: 0}), Heap({})]:
        assert D.pi(h) is CROSS
        assert E.pi(h) is CROSS


def test_conj_domain_stack_and_counter_with_junk():
    D = conj_domain(STK, CTR)
    s = (Int(1), Int(2))
    h = union(union(layout(STK_L, s, [20, 22]), Heap({CTR_P: 4})), junk_frames()[5])
    assert D.project(h) == Val((s, 4))
    w = D.witness(h)
    assert set(w) == {STK_L, 20, 22, CTR_P}


def test_split_witness_examples():
    h = Heap({CTR_P: 2, R: 9, 5: 0})
    h1, h2 = split_witness(CTR, ADDR, h)
    assert (CTR.pi(h1), ADDR.pi(h2)) == (2, Int(9))
    assert set(h1) | set(h2) == set(h) and not set(h1) & set(h2)
    assert all_split_values(CTR, ADDR, h) == {(2, Int(9))}
    assert split_witness(CTR, CTR, h) is None
    st_h = union(layout(STK_L, (Int(1),), [21]), Heap({CTR_P: 0}))
    a, b = split_witness(STK, CTR, st_h)
    assert set(a) == {STK_L, 21} and set(b) == {CTR_P}


def test_enumeration_fallback_agrees_with_witness_route():
    D = conj_domain(STK, CTR)
    E = conj_domain(no_witness(STK), no_witness(CTR))
    assert E.witness is None
    rng = random.Random(3)
    for h in gen_purview_heaps(D)[:60]:
        fr = rng.choice(junk_frames()[:12])
        if disjoint_ok(h, fr):
            h = union(h, fr)
        if len(h) <= 8:
            assert D.pi(h) == E.pi(h)


def disjoint_ok(h, fr):
    return not (set(h) & set(fr))


def test_partition_explosion_without_witness():
    E = conj_domain(no_witness(CTR), no_witness(ADDR), limit=4)
    with pytest.raises(PartitionExplosion):
        E.pi(Heap({a: 0 for a in range(1, 12)}))


def test_conj_program_examples():
    ctr = make_ctr()
    pop, decr = STACK.pop(1).abstract, ctr.decr().abstract
    m = conj_program(pop, decr)
    assert m((((), Int(1)), 0)) is BOT
    incr = ctr.incr().abstract
    framed = frame_identity(incr, ADDR)
    assert framed((4, Int(7))) == Val((5, Int(7)))
    chk = AbstractProgram(lambda a: CHECK, CTR, "chk")
    assert conj_program(chk, identity(ADDR))((0, Int(1))) is CHECK
    crs = AbstractProgram(lambda a: CROSS, CTR, "crs")
    assert conj_program(crs, identity(ADDR))((0, Int(1))) is TOP


def test_conj_program_case_table_exhaustive():
    outs = [BOT, CHECK, CROSS, TOP, Val(1), Val(2)]
    for ra, rb in product(outs, repeat=2):
        m = AbstractProgram(lambda a, r=ra: r, CTR)
        n = AbstractProgram(lambda b, r=rb: r, CTR)
        got = conj_program(m, n, conj_domain(CTR, no_witness(CTR)))((0, 0))
        if BOT in (ra, rb):
            assert got is BOT
        elif type(ra) is Val and type(rb) is Val:
            assert got == Val((ra.x, rb.x))
        else:
            from heapcomm.domain import join
            assert got == join(ra, rb)


def test_embed_matches_leaves_by_name():
    D = conj_domain(STK, CTR, ADDR)
    incr = make_ctr().incr().abstract
    e = embed(incr, D)
    s = (Int(1),)
    assert e((s, 3, Int(0))) == Val((s, 4, Int(0)))
    assert [L.name for L in leaves(D)] == [STK.name, CTR.name, ADDR.name]
    x = ((s, 3), Int(0))
    N = conj_domain(conj_domain(STK, CTR), ADDR)
    assert assemble(N, flatten(N, x)) == x
    with pytest.raises(ValueError):
        embed(incr, conj_domain(STK, ADDR))


def _split_heaps():
    """Heaps of at most 6 cells mixing a stack, a counter and junk."""
    out = []
    for s in [(), (Int(1),), (Int(1), Int(2))]:
        base = layout(STK_L, s, [20, 21][:len(s)])
        for ctr in [None, Int(0), Int(3), NULL]:
            h = base if ctr is None else union(base, Heap({CTR_P: ctr}))
            for fr in junk_frames()[:6]:
                hh = union(h, fr) if disjoint_ok(h, fr) else h
                if len(hh) <= 6:
                    out.append(hh)
    return out


@pytest.mark.parametrize("pair", ["stk-ctr", "ctr-addr", "stk-addr"])
def test_projection_uniqueness_by_full_enumeration(pair):
    A, B = {"stk-ctr": (STK, CTR), "ctr-addr": (CTR, ADDR),
            "stk-addr": (STK, make_addr(CTR_P, nat_values(9)))}[pair]
    D = conj_domain(A, B)
    for h in _split_heaps():
        vals = all_split_values(A, B, h)
        assert len(vals) <= 1, (h, vals)
        x = D.pi(h)
        assert (x is CROSS) == (not vals)
        if vals:
            assert vals == {x}


def test_locality_preserved_by_conjunction():
    D = conj_domain(STK, CTR)
    frames = junk_frames()
    for h in gen_purview_heaps(D)[:80]:
        for fr in frames[:10]:
            if disjoint_ok(h, fr):
                split = split_witness(STK, CTR, h)
                if split is not None:
                    a, b = split
                    assert check_locality(STK, a, fr) and check_locality(CTR, b, fr)
                assert check_locality(D, h, fr)


def _sample(D, n=60):
    heaps = gen_purview_heaps(D)[:n]
    return heaps + [union(h, junk_frames()[3]) for h in heaps if disjoint_ok(h, junk_frames()[3])]


@pytest.mark.parametrize("A,B", [(STK, CTR), (CTR, ADDR), (STK, ADDR)],
                         ids=["stk-ctr", "ctr-addr", "stk-addr"])
def test_swap_iso(A, B):
    AB, BA = conj_domain(A, B), conj_domain(B, A)
    assert check_iso(AB, BA, swap_bijection(), _sample(AB) + _sample(BA))


def test_reassoc_iso():
    A, B, C = STK, CTR, ADDR
    L = conj_domain(conj_domain(A, B), C)
    Rr = conj_domain(A, conj_domain(B, C))
    vals = L.space.values[:: max(1, len(L.space.values) // 500)]
    assert check_iso(L, Rr, reassoc_bijection(), _sample(L) + _sample(Rr), vals)


def test_swap_is_not_identity():
    AB, BA = conj_domain(CTR, ADDR), conj_domain(ADDR, CTR)
    from heapcomm.domain import identity_bijection
    r = check_iso(AB, BA, identity_bijection(), [Heap({CTR_P: 1, R: 2})])
    assert not r.ok and r.witness is not None


def test_obs_eq_of_conjunction_componentwise():
    D = conj_domain(STK, CTR)
    obs = obs_eq_of(D)
    s = (Int(2),)
    h1 = union(layout(STK_L, s, [20]), Heap({CTR_P: 1}))
    h2 = union(layout(STK_L, s, [23]), Heap({CTR_P: 1, 41: 0}))
    h3 = union(layout(STK_L, s, [23]), Heap({CTR_P: 2}))
    assert obs.equiv(h1, h2)
    assert not obs.equiv(h1, h3)
    heaps = _sample(D, 40)
    for a in heaps[:20]:
        for b in heaps[:20]:
            sa, sb = split_witness(STK, CTR, a), split_witness(STK, CTR, b)
            comp = (sa is not None and sb is not None
                    and STK.pi(sa[0]) == STK.pi(sb[0]) and CTR.pi(sa[1]) == CTR.pi(sb[1]))
            assert obs.equiv(a, b) == comp


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([Int(1), Int(2)]), max_size=3), st.integers(0, 5),
       st.permutations([20, 21, 22, 23]))
def test_split_independent_of_cell_choice(s, n, cells):
    D = conj_domain(STK, CTR)
    h = union(layout(STK_L, tuple(s), cells), Heap({CTR_P: n}))
    assert D.pi(h) == (tuple(s), n)
