import random

import pytest
from hypothesis import given, settings, strategies as st

from abslogic import examples as X
from abslogic.behavior import EnumConfig, enumerate_beh, trace_str
from abslogic.imp import ParseError, embed, load_module, mem_impl, parse, parse_expr, render
from abslogic.imp.syntax import render_expr
from abslogic.kernel import close, link
from abslogic.values import Int, List

from gen import random_imp_module

EC = EnumConfig(described={"mem.fresh": (Int(0), Int(1))})


def run(src, fn="T.main", args=(), budget=200, extra=()):
    m = load_module(src)
    b = enumerate_beh(close(link(mem_impl(), *extra, m), fn, List(tuple(Int(a) for a in args))), budget, EC)
    return [trace_str(t) for t in b.traces]


def prog(body, vars_="x, y", params=""):
    return f"module T;\ndef main({params}) {{\n  var {vars_};\n{body}\n}}\n"


@pytest.mark.parametrize("name", X.CORPUS)
def test_corpus_round_trip(name):
    m = parse(X.source(name))
    assert parse(render(m)) == m
    assert render(parse(render(m))) == render(m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_modules_round_trip_and_are_deterministic(seed):
    m = random_imp_module(random.Random(seed))
    assert parse(render(m)) == m
    b = enumerate_beh(close(link(embed(m)), "G.main", List(())), 500)
    assert len(b) == 1 and b.traces[0][1] != "partial"


@pytest.mark.parametrize("src", ["1 + 2 * 3", "(1 + 2) * 3", "1 - (2 - 3)", "a / b % c", "(a == b) < c"])
def test_expression_printing_keeps_structure(src):
    e = parse_expr(src)
    assert parse_expr(render_expr(e)) == e


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError, match=r"line 2, column 7: parameter names of 'f' must be distinct"):
        parse("module M;\ndef f(x, x) { return x; }\n")
    with pytest.raises(ParseError, match=r"line 3, column 10: unexpected character '\$'"):
        parse("module M;\ndef f() {\n  var x; $\n  return 0; }\n")
    with pytest.raises(ParseError, match="line 1"):
        parse("modul M;")


def test_hoare_f_arithmetic():
    f = X.imp_module("hoare_f")
    b = enumerate_beh(close(link(f), "F.f", List((Int(40),))), 50)
    assert [trace_str(t) for t in b.traces] == ["[print 441] Term 441"]


def test_division_truncates_and_zero_is_ub():
    assert run(prog("  x := 0 - 7;\n  print(x / 2);\n  print(x % 2);\n  return 0;")) == \
        ["[print -3, print -1] Term 0"]
    assert run(prog("  x := 1 / 0;\n  return 0;")) == ["[] UB..."]


def test_uninitialised_arithmetic_is_ub():
    assert run(prog("  y := x + 1;\n  return y;")) == ["[] UB..."]


def test_locals_persist_across_calls():
    src = ("module T;\nlocal g := 5;\n"
           "def main() {\n  var r;\n  r := T.inc();\n  r := T.inc();\n  return g;\n}\n"
           "def inc() {\n  var z;\n  g := g + 1;\n  return 0;\n}\n")
    assert run(src) == ["[] Term 7"]


def test_memory_round_trip_and_double_free():
    body = "  x := malloc(1);\n  store(x, 9);\n  y := load(x);\n  free(x);\n  return y;"
    assert run(prog(body)) == ["[] Term 9"]
    assert run(prog(body.replace("return y;", "free(x);\n  return y;"))) == ["[] UB..."]


def test_cmp_and_function_pointers():
    src = ("module T;\ndef main() {\n  var f, r, c;\n  f := &T.two;\n  r := (*f)(1);\n"
           "  c := cmp(r, 3);\n  return c;\n}\n"
           "def two(a) {\n  var z;\n  return a + 2;\n}\n")
    assert run(src) == ["[] Term 1"]


def test_arity_mismatch_is_ub():
    src = "module T;\ndef main() {\n  var r;\n  r := T.one(1, 2);\n  return r;\n}\ndef one(a) {\n  var z;\n  return a;\n}\n"
    assert run(src) == ["[] UB..."]


def test_locals_can_be_overridden():
    m = X.imp_module("cannon_main", fires=3)
    assert dict(m.init)["fires"].i == 3
    with pytest.raises(KeyError):
        X.imp_module("cannon_main", nope=1)
