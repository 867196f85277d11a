"""The memory module: blocks of 8-byte cells, fresh blocks chosen from a described domain."""
from __future__ import annotations

from dataclasses import dataclass

from ..abspec import TRIVIAL, PreAbs
from ..kernel import Described, ModuleSem, Ret, bind, choose, get_state, guarantee, put_state, ub
from ..values import INT64, PTR, VAL, Addr, Int, heap, unpack_args, upcast, VUndef

FRESH = Described("fresh-block", "mem.fresh")


@dataclass(frozen=True)
class MemState:
    used: frozenset = frozenset()
    cells: tuple = ()   # sorted ((block, off), value)

    def get(self, c):
        for k, v in self.cells:
            if k == c:
                return v
        return None

    def set(self, c, v):
        d = dict(self.cells)
        if v is None:
            d.pop(c, None)
        else:
            d[c] = v
        return MemState(self.used, tuple(sorted(d.items())))


EMPTY_MEM = MemState()


def _alloc(x):
    a = unpack_args(x, 1, [INT64])
    if a is None or a[0].i < 0:
        return ub()
    n = a[0].i

    def got(b, st):
        blk = b.i if isinstance(b, Int) else b
        if blk in st.used:
            return guarantee(False)
        cells = dict(st.cells)
        for i in range(n):
            cells[(blk, 8 * i)] = VUndef
        st2 = MemState(st.used | {blk}, tuple(sorted(cells.items())))
        return bind(put_state(st2), lambda _: Ret(Addr(heap(blk, 0))))
    return bind(get_state(), lambda st: bind(choose(FRESH), lambda b: got(b, st)))


def _cell(p):
    return (p.a.block, p.a.off)


def _free(x):
    a = unpack_args(x, 1, [PTR])
    if a is None:
        return ub()

    def k(st):
        c = _cell(a[0])
        if a[0].a.kind != "heap" or st.get(c) is None:
            return ub()
        return bind(put_state(st.set(c, None)), lambda _: Ret(Int(0)))
    return bind(get_state(), k)


def _load(x):
    a = unpack_args(x, 1, [PTR])
    if a is None:
        return ub()

    def k(st):
        v = st.get(_cell(a[0])) if a[0].a.kind == "heap" else None
        return ub() if v is None else Ret(upcast(v))
    return bind(get_state(), k)


def _store(x):
    a = unpack_args(x, 2, [PTR, VAL])
    if a is None:
        return ub()

    def k(st):
        c = _cell(a[0])
        if a[0].a.kind != "heap" or st.get(c) is None:
            return ub()
        return bind(put_state(st.set(c, a[1])), lambda _: Ret(Int(0)))
    return bind(get_state(), k)


MEM_FUNS = {"Mem.alloc": _alloc, "Mem.free": _free, "Mem.load": _load, "Mem.store": _store}


def mem_impl() -> ModuleSem:
    return ModuleSem("Mem", EMPTY_MEM, dict(MEM_FUNS))


def mem_preabs() -> PreAbs:
    """Friends get NB (they must use the pure specs); contexts run the implementation."""
    return PreAbs("Mem", EMPTY_MEM, {fn: (TRIVIAL, body) for fn, body in MEM_FUNS.items()},
                  doc={fn: ("NB", "implementation") for fn in MEM_FUNS})
