from abslogic import pcm as P
from abslogic.abspec import (ASSUME, GUARANTEE, NB_BODY, UB_BODY, AbsConfig, PreAbs, erase_listing, safe_module,
                             same, to_abs)
from abslogic.behavior import enumerate_beh, trace_str
from abslogic.kernel import ModuleSem, Ret, bind, call, close, link, obs
from abslogic.values import Int, Unit


def strs(b):
    return [trace_str(t) for t in b.traces]


def _pre():
    return PreAbs("K", Unit, {"K.f": (lambda x: Ret(Int(1)), UB_BODY), "K.g": same(lambda x: Ret(Int(2)))},
                  doc={"K.f": ("return 1", None)})


def _caller(name):
    return ModuleSem(name, Unit, {f"{name}.main": lambda x: bind(call("K.f", Unit), lambda r: obs("print", r))})


def test_to_abs_dispatches_on_the_caller():
    k = to_abs(_pre(), {"Friend"})
    assert strs(enumerate_beh(close(link(_caller("Friend"), k), "Friend.main"), 20)) == ["[print 1] Term 0"]
    assert enumerate_beh(close(link(_caller("Other"), k), "Other.main"), 20).is_top


def test_erase_listing():
    lst = erase_listing(_pre(), {"Friend"})
    assert lst["functions"]["K.f"] == {"friend": "return 1", "context": "UB"}
    assert lst["functions"]["K.g"]["context"] == "same as friend"
    nb = PreAbs("N", Unit, {"N.h": (NB_BODY, UB_BODY)})
    assert erase_listing(nb, set())["functions"]["N.h"] == {"friend": "NB", "context": "UB"}


def test_safe_modules_never_go_wrong():
    a = safe_module("A", ["B.g"], ["A.f"], args=(Unit, Int(1)))
    b = safe_module("B", ["A.f"], ["B.g"])
    beh = enumerate_beh(close(link(a, b), "A.f"), 14)
    assert all(t[1] not in ("error", "ub") for t in beh.traces)


def _run(prog, state=(P.EPS, Unit)):
    m = ModuleSem("S", state, {"S.main": lambda x: prog})
    return enumerate_beh(close(link(m), "S.main"), 20)


def test_assume_without_candidates_is_top():
    assert _run(ASSUME([], P.EPS, AbsConfig())).is_top


def test_assume_drops_invalid_candidates():
    cands = [("ok", P.BALL), ("clash", P.READY)]
    b = _run(bind(ASSUME(cands, P.EPS, AbsConfig()), lambda t: Ret(Int(len(t[0])))), (P.READY, Unit))
    assert strs(b) == ["[] Term 2"]


def test_guarantee_without_candidates_is_nb():
    b = _run(GUARANTEE([], P.EPS, lambda res: [P.EPS], lambda pl, rm, res: ()))
    assert strs(b) == ["[] Partial"]


def test_guarantee_keeps_valid_choices():
    g = GUARANTEE([("a", P.BALL), ("b", P.READY)], P.READY, lambda res: [P.EPS], lambda pl, rm, res: ())
    b = _run(bind(g, lambda t: obs("print", Int(len(t[0])))))
    assert strs(b) == ["[print 1] Term 0"]
