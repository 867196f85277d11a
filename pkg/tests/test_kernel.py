import pytest

from abslogic.behavior import enumerate_beh, enumerate_prog, trace_str
from abslogic.kernel import (BOOLS, Finite, ModuleSem, Ret, bind, call, choose, close, get_caller, get_state,
                             link, obs, put_state, repeat_n, while_loop)
from abslogic.values import Int, Str, Unit


def strs(b):
    return [trace_str(t) for t in b.traces]


def test_bind_is_associative_on_behaviours():
    f = lambda x: bind(obs("print", x), lambda _: Ret(Int(x.i + 1)))  # noqa: E731
    g = lambda y: bind(choose(Finite((Int(0), y))), lambda z: obs("print", z))  # noqa: E731
    left = enumerate_prog(lambda: bind(bind(Ret(Int(1)), f), g), 20)
    right = enumerate_prog(lambda: bind(Ret(Int(1)), lambda x: bind(f(x), g)), 20)
    assert left == right


def test_repeat_and_while():
    p = repeat_n(3, lambda i: obs("print", Int(i)))
    assert strs(enumerate_prog(p, 50)) == ["[print 0, print 1, print 2] Term ()"]
    loop = while_loop(lambda s: Ret(s.i < 2), lambda s: Ret(Int(s.i + 1)), Int(0))
    assert strs(enumerate_prog(loop, 50)) == ["[] Term 2"]


def test_unbounded_loop_is_partial():
    loop = while_loop(lambda s: choose(BOOLS), lambda s: obs("print", Int(0)))
    b = enumerate_prog(loop, 6)
    assert any(t[1] == "partial" for t in b.traces)


def test_link_reports_duplicates():
    a = ModuleSem("A", Unit, {"A.f": lambda x: Ret(x)})
    b = ModuleSem("B", Unit, {"A.f": lambda x: Ret(x)})
    assert link(a, b).duplicates == ("A.f",)
    assert link(a).well_formed


def test_first_definition_wins_and_missing_main_raises():
    a = ModuleSem("A", Unit, {"A.f": lambda x: Ret(Int(1))})
    b = ModuleSem("B", Unit, {"A.f": lambda x: Ret(Int(2))})
    assert strs(enumerate_beh(close(link(a, b), "A.f"), 10)) == ["[] Term 1"]
    with pytest.raises(KeyError):
        close(link(a), "A.g")


def test_undefined_call_is_error():
    a = ModuleSem("A", Unit, {"A.f": lambda x: call("Nope.g", Unit)})
    assert strs(enumerate_beh(close(link(a), "A.f"), 10)) == ["[] Error"]


def test_get_caller_and_module_state():
    def bump(x):
        return bind(get_state(), lambda n: bind(put_state(n + 1), lambda _: get_caller()))

    def main(x):
        return bind(call("C.bump", Unit), lambda who: bind(call("C.bump", Unit), lambda _: bind(
            call("C.peek", Unit), lambda n: bind(obs("print", Str(who)), lambda _: Ret(Int(n))))))
    c = ModuleSem("C", 0, {"C.bump": bump, "C.peek": lambda x: get_state()})
    m = ModuleSem("M", Unit, {"M.main": main})
    assert strs(enumerate_beh(close(link(m, c), "M.main"), 30)) == ["[print 'M'] Term 2"]


def test_top_level_caller_is_configurable():
    m = ModuleSem("M", Unit, {"M.main": lambda x: bind(get_caller(), lambda c: Ret(Str(c)))})
    assert strs(enumerate_beh(close(link(m), "M.main"), 5)) == ["[] Term 'Top'"]
    assert strs(enumerate_beh(close(link(m), "M.main", Unit, "Main"), 5)) == ["[] Term 'Main'"]
