# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled trace-set operations; same contract as _tracekernel_py."""

from abslogic.values import Tagged

TERM = "term"
ERROR = "error"
PARTIAL = "partial"
UB = "ub"


def _sort_key(t):
    v = t[2]
    return (t[0], t[1], () if v is None else (v,))


cpdef bint is_prefix(tuple p, tuple e):
    cdef Py_ssize_t n = len(p), i
    if n > len(e):
        return False
    for i in range(n):
        if p[i] is not e[i] and p[i] != e[i]:
            return False
    return True


cpdef tuple lcp(tuple a, tuple b):
    cdef Py_ssize_t n = min(len(a), len(b))
    cdef Py_ssize_t i = 0
    while i < n and (a[i] is b[i] or a[i] == b[i]):
        i += 1
    return a[:i]


cdef bint _hits(tuple e, set ubset):
    cdef Py_ssize_t i
    for i in range(len(e) + 1):
        if e[:i] in ubset:
            return True
    return False


cdef bint _covered(list minimal, tuple p):
    cdef tuple q
    for q in minimal:
        if is_prefix(q, p):
            return True
    return False


cpdef tuple normalize(traces):
    cdef set ts = set(traces)
    cdef list ubs, minimal, kept, out
    cdef set ubset, proper, whole
    cdef tuple t, e, p
    cdef Py_ssize_t i
    if not ts:
        return (((), PARTIAL, None),)
    ubs = [t[0] for t in ts if t[1] == UB]
    if ubs:
        ubs.sort(key=len)
        minimal = []
        for p in ubs:
            if not _covered(minimal, p):
                minimal.append(p)
        ubset = set(minimal)
        kept = []
        for t in ts:
            e = t[0]
            if t[1] == UB and e in ubset:
                kept.append(t)
                continue
            if _hits(e, ubset):
                continue
            kept.append(t)
    else:
        kept = list(ts)
    proper = set()
    whole = set()
    for t in kept:
        e = t[0]
        for i in range(len(e)):
            proper.add(e[:i])
        if t[1] != PARTIAL:
            whole.add(e)
    out = [t for t in kept if t[1] != PARTIAL or (t[0] not in proper and t[0] not in whole)]
    out.sort(key=_sort_key)
    return tuple(out)


def union(a, b):
    if a == b:
        return a
    return normalize(tuple(a) + tuple(b))


cdef tuple _meet(tuple x, tuple y):
    cdef tuple ex = x[0], ey = y[0]
    cdef object kx = x[1], ky = y[1]
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
    if a == b:
        return a
    cdef set out = set()
    cdef tuple x, y
    for x in a:
        for y in b:
            out.add(_meet(x, y))
    return normalize(out)


def included(impl, abs_):
    cdef set ubp = set(), prefixes = set(), exact = set()
    cdef tuple t, e, w
    cdef Py_ssize_t i
    for t in abs_:
        e = t[0]
        if t[1] == UB:
            ubp.add(e)
        elif t[1] != PARTIAL:
            exact.add(t)
        for i in range(len(e) + 1):
            prefixes.add(e[:i])
    for t in impl:
        e = t[0]
        k = t[1]
        if ubp and _hits(e, ubp):
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
    cdef tuple t
    return tuple(((event,) + t[0], t[1], t[2]) for t in traces)
