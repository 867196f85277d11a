"""Trace-set operations, pure Python.

A trace is ``(events, kind, value)`` where ``events`` is a tuple of
``(fn, args, ret)`` records and ``kind`` is one of "term", "error",
"partial" or "ub".  A "ub" trace at prefix ``p`` stands for every trace
extending ``p``.  Sets are kept normalized: sorted, duplicate free, with
partial traces dropped when another member already implies them.
"""

from .values import Tagged

TERM = "term"
ERROR = "error"
PARTIAL = "partial"
UB = "ub"


def _sort_key(t):
    v = t[2]
    return (t[0], t[1], () if v is None else (v,))


def is_prefix(p, e):
    n = len(p)
    return n <= len(e) and e[:n] == p


def lcp(a, b):
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return a[:i]


def normalize(traces):
    traces = set(traces)
    if not traces:
        return (((), PARTIAL, None),)
    ubs = [t[0] for t in traces if t[1] == UB]
    if ubs:
        ubs.sort(key=len)
        minimal = []
        for p in ubs:
            if not any(is_prefix(q, p) for q in minimal):
                minimal.append(p)
        ubset = set(minimal)
        kept = []
        for t in traces:
            e = t[0]
            if t[1] == UB and e in ubset:
                kept.append(t)
                continue
            if any(e[:i] in ubset for i in range(len(e) + 1)):
                continue
            kept.append(t)
        traces = kept
    proper = set()
    whole = set()
    for t in traces:
        e = t[0]
        for i in range(len(e)):
            proper.add(e[:i])
        if t[1] != PARTIAL:
            whole.add(e)
    out = [t for t in traces if t[1] != PARTIAL or (t[0] not in proper and t[0] not in whole)]
    out.sort(key=_sort_key)
    return tuple(out)


def union(a, b):
    if a == b:
        return a
    return normalize(tuple(a) + tuple(b))


def _meet(x, y):
    ex, kx = x[0], x[1]
    ey, ky = y[0], y[1]
    if kx == UB and ky == UB:
        if is_prefix(ex, ey):
            return y
        if is_prefix(ey, ex):
            return x
        return (lcp(ex, ey), PARTIAL, None)
    if kx == UB:
        return y if is_prefix(ex, ey) else (lcp(ex, ey), PARTIAL, None)
    if ky == UB:
        return x if is_prefix(ey, ex) else (lcp(ex, ey), PARTIAL, None)
    if x == y:
        return x
    return (lcp(ex, ey), PARTIAL, None)


def intersect(a, b):
    """Intersection of the partial-closures of two normalized sets."""
    if a == b:
        return a
    out = set()
    for x in a:
        for y in b:
            out.add(_meet(x, y))
    return normalize(out)


def included(impl, abs_):
    """Return None when every impl trace is covered, else an uncovered trace."""
    ubp = set()
    prefixes = set()
    exact = set()
    for t in abs_:
        e = t[0]
        if t[1] == UB:
            ubp.add(e)
        elif t[1] != PARTIAL:
            exact.add(t)
        for i in range(len(e) + 1):
            prefixes.add(e[:i])
    for t in impl:
        e, k = t[0], t[1]
        if ubp and any(e[:i] in ubp for i in range(len(e) + 1)):
            continue
        if k == PARTIAL:
            if e in prefixes:
                continue
            return t
        if k == UB:
            w = (e, ERROR, None)
            if w in exact:
                w = (e, TERM, Tagged("ub-witness"))
            return w
        if t in exact:
            continue
        return t
    return None


def prefix_all(traces, event):
    return tuple(((event,) + t[0], t[1], t[2]) for t in traces)
