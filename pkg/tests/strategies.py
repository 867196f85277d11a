"""Hypothesis strategies for values and trace sets."""
from hypothesis import strategies as st

from abslogic import _tracekernel_py as tk
from abslogic.values import (NONE, Addr, Bool, Int, List, Ord, Ordinal, Pair, Some, Str, Tagged, Unit,
                             fnaddr, heap)

ints64 = st.integers(min_value=-(1 << 63), max_value=(1 << 63) - 1)

leaves = st.one_of(
    ints64.map(Int),
    st.text(max_size=4).map(Str),
    st.booleans().map(Bool),
    st.just(Unit),
    st.just(NONE),
    st.builds(lambda b, o: Addr(heap(b, 8 * o)), st.integers(0, 4), st.integers(0, 3)),
    st.sampled_from(["F.f", "SC.succ"]).map(lambda n: Addr(fnaddr(n))),
    st.builds(lambda k, n: Ord(Ordinal(k, n)), st.integers(0, 3), st.integers(0, 5)),
)

any_values = st.recursive(
    leaves,
    lambda inner: st.one_of(
        st.lists(inner, max_size=3).map(lambda xs: List(tuple(xs))),
        st.tuples(inner, inner).map(lambda p: Pair(*p)),
        inner.map(Some),
        st.tuples(st.sampled_from(["undef", "tag"]), inner).map(lambda p: Tagged(*p)),
    ),
    max_leaves=8,
)

_events = st.sampled_from([("print", Int(i), Int(0)) for i in range(3)] + [("getint", Unit, Int(1))])

traces = st.builds(
    lambda evs, kind, v: (tuple(evs), kind, Int(v) if kind == tk.TERM else None),
    st.lists(_events, max_size=4),
    st.sampled_from([tk.TERM, tk.ERROR, tk.PARTIAL, tk.UB]),
    st.integers(0, 2),
)

trace_sets = st.lists(traces, max_size=8)
