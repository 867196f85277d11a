import pytest

from abslogic import pcm as P
from abslogic import speclang as S
from abslogic.values import OMEGA, Addr, Int, List, Ordinal, fnaddr, heap

UNIT_PCM = P.Pcm("unit", (P.EPS, P.BAD))


def test_star():
    s = S.default_spec()
    x = List((Int(3),))
    assert s.pre((), x, x, None, P.EPS)
    assert not s.pre((), x, List((Int(4),)), None, P.EPS)
    assert not s.pre((), x, x, Ordinal(0, 1), P.EPS)
    assert s.post((), Int(1), Int(1), P.EPS)


def test_tables_default_to_star():
    t = S.SpecTable({"F.f": S.s_f_hoare()["F.f"]})
    assert t.spec("G.g") is S.STAR
    assert set(S.union(S.s_f_hoare(), S.s_main_hoare())) == {"F.f", "Main.main"}


def test_hoare_f_spec():
    f = S.s_f_hoare()["F.f"]
    forty = List((Int(40),))
    assert f.pre((), forty, forty, None, P.EPS)
    assert not f.pre((), List((Int(41),)), List((Int(41),)), None, P.EPS)
    assert f.post((), Int(441), Int(441), P.EPS)
    assert not f.post((), Int(440), Int(440), P.EPS)


def test_stronger():
    f = S.s_f_hoare()["F.f"]
    samples = [(List((Int(n),)), List((Int(n),)), None) for n in (0, 4, 5)]
    posts = [(Int(n), Int(n)) for n in (1, 2, 5)]
    assert S.stronger(UNIT_PCM, f, f, samples, posts)
    weaker = S.spec_of_hl(lambda x: True, lambda r: r.i % 4 == 1)
    assert S.stronger(UNIT_PCM, weaker, f, samples, posts)
    assert not S.stronger(UNIT_PCM, f, weaker, samples, posts)


def test_star_and_fire_are_incomparable():
    fire = S.s_cannon()["Cannon.fire"]
    x = List(())
    # star may drop the Ball, but its post also admits results other than 1
    assert S.stronger(P.CANNON, S.STAR, fire, [(x, x, None)], [(Int(1), Int(1))])
    assert not S.stronger(P.CANNON, S.STAR, fire, [(x, x, None)], [(Int(0), Int(0))])
    # no update turns the empty resource into a Ball
    assert not S.stronger(P.CANNON, fire, S.STAR, [(x, x, None)], [(Int(1), Int(1))])


def test_table_strengthening_is_map_subset():
    mem = S.s_mem()
    x = List((Int(1),))
    assert S.stronger_table(UNIT_PCM, mem, mem.restrict({"Mem.alloc"}), [(x, x, None)], [])


def test_mem_load_pre():
    load = S.s_mem()["Mem.load"]
    p = Addr(heap(0, 0))
    res = S.mem_pt(p, [Int(1)])
    assert load.pre((p, Int(1)), List((p,)), List((p,)), Ordinal(0, 1), res)
    assert not load.pre((p, Int(1)), List((p,)), List((p,)), None, res)


def test_alloc_requires_nonnegative_and_pure():
    alloc = S.s_mem()["Mem.alloc"]
    x = List((Int(1),))
    assert alloc.pre(1, x, x, Ordinal(0, 4), P.EPS)
    assert not alloc.pre(1, x, x, None, P.EPS)
    assert not alloc.pre(-1, List((Int(-1),)), List((Int(-1),)), Ordinal(0, 4), P.EPS)


def test_repeat_measure():
    rp = S.h_rp(S.s_sc())["RP.repeat"]
    f = Addr(fnaddr("SC.succ"))
    x = List((f, Int(2), Int(3)))
    a = (f, 2, 3, "succ")
    assert rp.pre(a, x, x, Ordinal(1, 2), P.EPS)
    assert not rp.pre(a, x, x, Ordinal(0, 9), P.EPS)
    assert rp.post(a, Int(5), Int(5), P.EPS)


def test_repeat_rejects_a_callee_with_the_wrong_spec():
    wrong = S.SpecTable({"SC.succ": S.fptr_spec("succ")})
    assert S.h_rp(wrong).callee_ok("SC.succ", "succ")
    twice = S.Spec("SC.succ", tuple(range(-2, 8)),
                   lambda m, x, xa, d, res: x == List((Int(m),)) and res == P.EPS,
                   lambda m, r, ra, res: r == Int(m + 2) and res == P.EPS)
    assert not S.h_rp(S.SpecTable({"SC.succ": twice})).callee_ok("SC.succ", "succ")
    assert not S.h_rp(S.SpecTable()).callee_ok("SC.succ", "succ")
    assert OMEGA == Ordinal(1, 0)


def test_bag_pop_admits_zero_or_property():
    pop = S.s_stack2b()["Stack.pop"]
    h = Addr(heap(0, 0))
    res = S.is_bag(h, "odds")
    assert pop.post((h, "odds"), Int(0), Int(0), res)
    assert pop.post((h, "odds"), Int(1), Int(1), res)
    assert not pop.post((h, "odds"), Int(2), Int(2), res)


def test_unsound_call_hint_rejected_at_registration():
    with pytest.raises(ValueError):
        S.Spec("bad", ((),), lambda a, x, xa, d, res: False, lambda a, r, ra, res: True,
               samples=((List(()), P.EPS),))
