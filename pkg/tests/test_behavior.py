import json

import pytest

from abslogic.behavior import (NB_SET, TOP_SET, EnumConfig, EnumConfigMissing, ScriptExhausted, check_refine,
                               enumerate_prog, included, run_once, trace_str)
from abslogic.kernel import (BOOLS, Described, Finite, ModuleSem, Ret, assume, bind, choose, close, guarantee,
                             link, nb, obs, take, ub)
from abslogic.values import Int, Unit


def strs(b):
    return [trace_str(t) for t in b.traces]


def pr(i):
    return obs("print", Int(i))


def test_guarantee_false_is_a_single_partial_trace():
    assert strs(enumerate_prog(guarantee(False), 5)) == ["[] Partial"]
    assert enumerate_prog(nb(), 5) == NB_SET


def test_assume_false_is_top():
    assert enumerate_prog(assume(False), 5).is_top
    assert enumerate_prog(ub(), 5) == TOP_SET


def test_choose_is_union_take_is_intersection():
    ch = lambda pick: bind(pick(BOOLS), lambda b: pr(1 if b else 2))  # noqa: E731
    assert strs(enumerate_prog(ch(choose), 10)) == ["[print 1] Term 0", "[print 2] Term 0"]
    assert strs(enumerate_prog(ch(take), 10)) == ["[] Partial"]
    same = bind(take(BOOLS), lambda b: pr(1))
    assert strs(enumerate_prog(same, 10)) == ["[print 1] Term 0"]


def test_take_ignores_ub_branches():
    p = bind(take(BOOLS), lambda b: pr(1) if b else ub())
    assert strs(enumerate_prog(p, 10)) == ["[print 1] Term 0"]


def test_ub_after_events():
    p = bind(pr(1), lambda _: ub())
    assert strs(enumerate_prog(p, 10)) == ["[print 1] UB..."]


def test_described_domain_needs_config():
    p = choose(Described("widgets", "w"))
    with pytest.raises(EnumConfigMissing):
        enumerate_prog(p, 5)
    ec = EnumConfig(described={"w": (Int(7),)})
    assert strs(enumerate_prog(p, 5, ec)) == ["[] Term 7"]


def test_scripts_and_responders():
    p = bind(obs("getint", Unit), lambda a: bind(obs("getint", Unit), lambda b: Ret(Int(a.i + b.i))))
    ec = EnumConfig(scripts={"getint": (Int(3), Int(4))})
    assert strs(enumerate_prog(p, 10, ec)) == ["[getint ()->3, getint ()->4] Term 7"]
    short = EnumConfig(scripts={"getint": (Int(3),)})
    assert strs(enumerate_prog(p, 10, short)) == ["[getint ()->3] Partial"]
    many = EnumConfig(responders={"getint": (Int(0), Int(1))})
    assert len(enumerate_prog(p, 10, many)) == 4


def test_config_from_dict():
    ec = EnumConfig.from_dict({"fresh": [5], "scripts": {"getint": [1, 0]}, "default_response": [9]})
    assert ec.described["mem.fresh"] == (Int(5),)
    assert ec.scripts["getint"] == (Int(1), Int(0))
    assert ec.default_response == (Int(9),)


def test_included_and_witness():
    a = enumerate_prog(bind(pr(1), lambda _: ub()), 10)
    b = enumerate_prog(pr(1), 10)
    assert included(b, a)
    v = included(a, b)
    assert not v and trace_str(v.witness) == "[print 1] Error"


def _mods(body):
    return [ModuleSem("M", Unit, {"M.main": body})]


def test_check_refine_report():
    impl = _mods(lambda x: pr(1))
    abs_ = _mods(lambda x: bind(choose(BOOLS), lambda b: pr(1 if b else 2)))
    r = check_refine(impl, abs_, [], "M.main", [Unit], 10)
    assert r["verdict"] == "Holds"
    r = check_refine(abs_, impl, [], "M.main", [Unit], 10)
    assert r["verdict"] == "Violation"
    assert r["results"][0]["witness_text"] == "[print 2] Term 0"


def test_behaviour_json_is_canonical():
    p = lambda: bind(choose(Finite((Int(2), Int(0), Int(1)))), pr_of)  # noqa: E731
    first = json.dumps(enumerate_prog(p, 10).to_json(), sort_keys=True)
    for _ in range(3):
        assert json.dumps(enumerate_prog(p, 10).to_json(), sort_keys=True) == first


def pr_of(v):
    return obs("print", v)


def test_run_once_follows_picks():
    p = bind(choose(BOOLS), lambda b: pr(1 if b else 2))
    cp = close(link(_mods(lambda x: p)), "M.main")
    t = run_once(cp, 10, lambda kind, vs: vs[1])
    assert trace_str(t) == "[print 2] Term 0"

    def empty(kind, vs):
        raise ScriptExhausted()
    assert run_once(cp, 10, empty)[1] == "partial"


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        enumerate_prog(Ret(Unit), 0)
