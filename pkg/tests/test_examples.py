import pytest

from abslogic import examples as X
from abslogic.behavior import enumerate_beh, trace_str
from abslogic.kernel import close, link
from abslogic.values import Int, List


def beh(b, kinds=None, fn=None, arg=None):
    fn = fn or b.main[0]
    arg = b.main[1][0] if arg is None else arg
    return [trace_str(t) for t in enumerate_beh(close(link(b.stack(kinds)), fn, arg, b.caller), b.budget,
                                                b.enumcfg).traces]


def test_unknown_example():
    with pytest.raises(KeyError, match="unknown example"):
        X.build("landin")


@pytest.mark.parametrize("name", X.NAMES)
def test_bundles_are_consistent(name):
    b = X.build(name)
    assert set(b.preabs) == set(b.impl) == set(b.specs)
    for m, fr in b.friends.items():
        assert m in b.preabs and isinstance(fr, set)
    assert link(b.stack()).well_formed and link(b.stack(b.all_("abs"))).well_formed


def test_hoare_trace():
    assert beh(X.hoare()) == ["[print 441, print 42] Term 0"]


def test_echo_reverses_a_longer_script():
    b = X.echo((1, 2, 3, 0))
    out = beh(b)
    assert out == ["[getint ()->1, getint ()->2, getint ()->3, getint (), putint 3, putint 2, putint 1] Term 0"]
    assert beh(b, b.all_("abs")) == out


def test_repeat_adds():
    b = X.repeat()
    assert beh(b, fn="AD.add", arg=List((Int(2), Int(3)))) == ["[] Term 5"]


def test_cannon_parameter():
    assert beh(X.cannon(2)) == ["[print 1, print 1] UB..."]
    assert X.cannon(3).name == "cannon[3]"


def test_check_all_order_and_kinds():
    out = X.check_all(X.mem())
    assert [c["kind"] for c in out] == ["module", "erasure", "end-to-end"]
    assert all(c["verdict"] == "Holds" for c in out)


def test_stack2_uses_the_erased_pool_as_implementation():
    b = X.stack2a()
    assert set(b.impl["Stack"].funs) == set(X.a1_stack().funs)
    assert b.impl["Stack"].init == ()


def test_echo_erasure_listing_marks_context_ub():
    from abslogic.abspec import erase_listing
    b = X.echo()
    fs = erase_listing(b.preabs["Echo"], b.friends["Echo"])["functions"]
    assert fs["Echo.input"]["context"] == "UB" and fs["Echo.output"]["context"] == "UB"


def test_stack1_catches_a_broken_pop():
    b = X.stack1()
    src = X.source("stack").replace("store(stk, next);", "skip;")
    from abslogic.imp import load_module
    b.impl["Stack"] = load_module(src)
    assert b.refine({}, {"Stack": "abspec"})["verdict"] == "Violation"
