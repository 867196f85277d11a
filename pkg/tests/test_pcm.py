import itertools

import pytest
from hypothesis import given, strategies as st

from abslogic import pcm as P
from abslogic.values import Int, heap

MEM = P.mem_pcm([(0, 0), (0, 8)], (0, 1))
SMALL = [P.CANNON, MEM, P.excl_pcm([1, 2]), P.ag_pcm([1, 2]),
         P.prod_pcm(P.excl_pcm([1]), P.ag_pcm([1, 2]))]


def test_cannon_table():
    assert P.add(P.BALL, P.READY) == P.LOADED
    assert P.add(P.READY, P.READY) == P.BAD
    assert P.add(P.FIRED, P.BALL) == P.BAD
    assert P.add(P.EPS, P.FIRED) == P.FIRED


@pytest.mark.parametrize("u", SMALL, ids=lambda u: u.name)
def test_laws(u):
    assert not any(P.check_laws(u).values())


@pytest.mark.parametrize("u", [P.CANNON, P.excl_pcm([1, 2]), P.ag_pcm([1, 2])], ids=lambda u: u.name)
def test_fpu_is_a_preorder(u):
    xs = u.universe
    for a in xs:
        assert P.fpu(u, a, a)
    for a, b, c in itertools.product(xs, repeat=3):
        if P.fpu(u, a, b) and P.fpu(u, b, c):
            assert P.fpu(u, a, c)


def test_fpu_examples():
    assert P.fpu(P.CANNON, P.LOADED, P.FIRED)
    assert not P.fpu(P.CANNON, P.READY, P.FIRED)
    assert P.upd_modality(P.CANNON, P.LOADED, lambda r: r == P.FIRED)
    with pytest.raises(ValueError):
        P.fpu(P.Pcm("none"), P.EPS, P.EPS)


@given(st.sampled_from(MEM.universe), st.sampled_from(MEM.universe))
def test_minus_inverts_add(a, b):
    s = P.add(a, b)
    if s != P.BAD:
        c = P.minus(s, a)
        assert c is not None and P.add(a, c) == s
        assert P.included(a, s)


@given(st.integers(0, 3), st.lists(st.integers(0, 2), min_size=1, max_size=4))
def test_points_to_cons(blk, vs):
    p = heap(blk, 0)
    assert P.points_to(p, vs) == P.add(P.points_to(p, vs[:1]), P.points_to(p.shift(8), vs[1:]))


def test_points_to_cells_are_exclusive():
    p = heap(0, 0)
    assert P.add(P.points_to(p, [1]), P.points_to(p, [1])) == P.BAD
    whole = P.mem_full({(0, 0): 1})
    assert P.valid(P.add(whole, P.points_to(p, [Int(1)])))
    assert not P.valid(P.add(whole, P.points_to(p, [Int(0)])))


def test_mixing_carriers_raises():
    with pytest.raises(P.PcmError):
        P.add(P.BALL, P.points_to(heap(0), [1]))


def test_global_projection():
    g = P.add(P.inj("Cannon", P.READY), P.inj("Mem", P.points_to(heap(0), [1])))
    assert P.proj("Cannon", g) == P.READY
    assert P.proj("Stack", g) == P.EPS
