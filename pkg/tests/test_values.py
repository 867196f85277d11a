import pytest
from hypothesis import given, strategies as st

from abslogic.values import (BOOL, INT64, LIST_INT64, LIST_VAL, ORDINAL, PTR, TEXT, UNDEF_ANY, VAL, Addr, Bool,
                             Int, List, Ord, Ordinal, Str, Unit, VInt, VPtr, VUndef, downcast, from_json, heap,
                             measure_lt, ord_lt, ord_pred, pack, show, to_json, unpack_args, upcast, wrap64)

from strategies import any_values, ints64


@given(any_values)
def test_json_round_trip(v):
    assert from_json(to_json(v)) == v


@given(any_values, any_values)
def test_order_is_total_and_consistent(a, b):
    assert (a < b) + (b < a) + (a == b) == 1


@given(st.lists(any_values, max_size=6))
def test_sorting_is_deterministic(xs):
    assert sorted(xs) == sorted(reversed(xs))


@given(ints64)
def test_int_carrier_round_trip(i):
    assert downcast(upcast(VInt(i)), VAL) == VInt(i)
    assert downcast(Int(i), INT64) == i


@given(st.integers())
def test_ints_wrap_to_64_bits(i):
    assert Int(i).i == wrap64(i)
    assert -(1 << 63) <= Int(i).i < (1 << 63)


def test_wrap_examples():
    assert Int(1 << 63).i == -(1 << 63)
    assert Int(-(1 << 63) - 1).i == (1 << 63) - 1


def test_imp_values_embed():
    p = heap(2, 8)
    assert upcast(VPtr(p)) == Addr(p)
    assert downcast(Addr(p), PTR) == VPtr(p)
    assert upcast(VUndef) == UNDEF_ANY
    assert downcast(UNDEF_ANY, VAL) is VUndef


def test_downcast_mismatches_are_none():
    assert downcast(Str("x"), INT64) is None
    assert downcast(Int(1), PTR) is None
    assert downcast(List((Int(1), Str("a"))), LIST_INT64) is None
    assert downcast(List((Int(1), UNDEF_ANY)), LIST_VAL) == [VInt(1), VUndef]
    assert downcast(Bool(True), BOOL) is True
    assert downcast(Str("s"), TEXT) == "s"
    assert downcast(Ord(Ordinal(1, 2)), ORDINAL) == Ordinal(1, 2)
    with pytest.raises(ValueError):
        downcast(Int(1), "float")


def test_unpack_args():
    assert unpack_args(pack(3, 4), 2, [INT64, INT64]) == [VInt(3), VInt(4)]
    assert unpack_args(pack(3), 2, [INT64, INT64]) is None
    assert unpack_args(List((Str("x"),)), 1, [VAL]) is None
    assert unpack_args(Unit, 0, []) is None


def test_ordinals():
    w = Ordinal(1, 0)
    assert ord_lt(Ordinal(0, 100), w)
    assert all(ord_lt(o, Ordinal(2, 1)) for o in ord_pred(Ordinal(2, 1)))
    assert ord_pred(Ordinal(0, 0)) == []
    assert measure_lt(Ordinal(5, 5), None)
    assert not measure_lt(None, Ordinal(0, 1))
    assert measure_lt(None, None)   # an impure caller may make impure calls
    assert measure_lt(Ordinal(0, 1), Ordinal(0, 2))
    assert not measure_lt(Ordinal(1, 0), Ordinal(1, 0))
    with pytest.raises(ValueError):
        Ordinal(-1, 0)


def test_show():
    assert show(List((Int(1), Bool(False)))) == "[1, false]"
    assert show(Unit) == "()"
