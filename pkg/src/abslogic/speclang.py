"""Function specifications, spec tables and the sampled strengthening check.

A Spec pairs decidable pre/post predicates with *hint* generators.  The
predicates are the specification; the hints enumerate the finitely many
candidate tuples that the operational translation may choose or take.
Candidates are always filtered through the predicates, so a hint can only
narrow the explored space, never make an unsound tuple pass.  Caller-side
hints read resources from ``own`` only, so a caller never hands over a
resource it does not hold.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from . import pcm as P
from .pcm import EPS, inj, proj
from .values import Addr, AnyValue, Int, List, Ordinal, OMEGA, UNDEF_ANY, Unit, heap


def _none(*_a):
    return ()


@dataclass
class Spec:
    name: str
    A: tuple
    pre: Callable      # (a, x, xa, d, res) -> bool
    post: Callable     # (a, r, ra, res) -> bool
    entry: Callable = None      # (x, res_m) -> [(a, xa, d, res)]       callee takes
    call: Callable = None       # (xa, own) -> [(a, x, d, res)]         caller chooses
    ret: Callable = None        # (a, r, res_f) -> [(ra, res)]           caller takes
    exit: Callable = None       # (a, ra, res_m) -> [(r, res)]           callee chooses
    pure_ret: Callable = None   # (a, xa, res_m) -> [ra]                 pure branch
    res_m_exit: Callable = None  # (a, res_m, r, res) -> [res_m']        module resource updates
    samples: tuple = ()

    def __post_init__(self):
        A = self.A
        if self.entry is None:
            self.entry = lambda x, res_m: [(a, x, None, EPS) for a in A]
        if self.call is None:
            self.call = lambda xa, own: [(a, xa, None, EPS) for a in A]
        if self.ret is None:
            self.ret = lambda a, r, res_f: [(r, EPS)]
        if self.exit is None:
            self.exit = lambda a, ra, res_m: [(ra, EPS)]
        if self.pure_ret is None:
            self.pure_ret = _none
        if self.res_m_exit is None:
            self.res_m_exit = _none
        # entry hints are filtered at run time; only choose-side hints must be sound
        for x, _res_m in self.samples:
            for a, x2, d, res in self.call(x, EPS):
                if not self.pre(a, x2, x, d, res):
                    raise ValueError(f"{self.name}: call hint {(a, x2, d, res)!r} violates the precondition")

    def __repr__(self):
        return f"Spec({self.name})"


def _star_pre(a, x, xa, d, res):
    return d is None and x == xa and res == EPS


def _star_post(a, r, ra, res):
    return r == ra and res == EPS


STAR = Spec("s*", ((),), _star_pre, _star_post)


def default_spec() -> Spec:
    return STAR


def spec_of_hl(pre: Callable[[AnyValue], bool], post: Callable[[AnyValue], bool], name="hl") -> Spec:
    """Resource-free Hoare triple; the measure is left unconstrained."""
    return Spec(name, ((),),
                lambda a, x, xa, d, res: xa == x and res == EPS and bool(pre(x)),
                lambda a, r, ra, res: ra == r and res == EPS and bool(post(r)))


class SpecTable(dict):
    """fn name -> Spec; undeclared names resolve to s*."""

    def spec(self, fn) -> Spec:
        return self.get(fn, STAR)

    def restrict(self, names):
        return SpecTable({k: v for k, v in self.items() if k in names})

    def __or__(self, other):
        out = SpecTable(self)
        out.update(other)
        return out


def union(*tables) -> SpecTable:
    out = SpecTable()
    for t in tables:
        out.update(t)
    return out


# -- strengthening -----------------------------------------------------------

def stronger(pcm: P.Pcm, s1: Spec, s0: Spec, pre_samples, post_samples) -> bool:
    """Sampled ``s1 ⊒ s0``: every a0 has an a1 whose pre is reachable from
    pre0 and whose post reaches post0, by updates over the PCM universe."""
    univ = pcm._univ()

    def pre_ok(a0, a1):
        for x, xa, d in pre_samples:
            for r in univ:
                if s0.pre(a0, x, xa, d, r) and not P.upd_modality(pcm, r, lambda r2: s1.pre(a1, x, xa, d, r2)):
                    return False
        return True

    def post_ok(a0, a1):
        for rv, ra in post_samples:
            for r in univ:
                if s1.post(a1, rv, ra, r) and not P.upd_modality(pcm, r, lambda r2: s0.post(a0, rv, ra, r2)):
                    return False
        return True

    return all(any(pre_ok(a0, a1) and post_ok(a0, a1) for a1 in s1.A) for a0 in s0.A)


def stronger_table(pcm: P.Pcm, t1: SpecTable, t0: SpecTable, pre_samples, post_samples) -> bool:
    for fn, s0 in t0.items():
        if fn not in t1:
            return False
        if t1[fn] is not s0 and not stronger(pcm, t1[fn], s0, pre_samples, post_samples):
            return False
    return True


# -- value domains used by the built-in tables ------------------------------

@dataclass(frozen=True)
class Domains:
    """Finite candidate sets for quantifiers and hints."""
    blocks: tuple = (0, 1, 2, 3)
    ints: tuple = (0, 1, 2)
    max_len: int = 2
    measure: Ordinal = Ordinal(0, 4)
    props: tuple = ("evens", "odds", "nonzero")
    fsems: tuple = ("succ",)

    @property
    def handles(self):
        return tuple(Addr(heap(b, 0)) for b in self.blocks)

    def lists(self, elems=None, nonzero=False):
        elems = tuple(self.ints if elems is None else elems)
        if nonzero:
            elems = tuple(e for e in elems if e != 0)
        out = []
        for n in range(self.max_len + 1):
            out.extend(itertools.product(elems, repeat=n))
        return [List(tuple(Int(i) for i in l)) for l in out]


DOMAINS = Domains()

PROPS = {
    "evens": lambda v: isinstance(v, Int) and v.i % 2 == 0,
    "odds": lambda v: isinstance(v, Int) and v.i % 2 == 1,
    "nonzero": lambda v: isinstance(v, Int) and v.i != 0,
}

FSEMS = {
    "succ": lambda m: m + 1,
    "double": lambda m: 2 * m,
}


def _is_some(d):
    return d is not None


def _args(x, n):
    return isinstance(x, List) and len(x.items) == n


# -- resources used by the tables --------------------------------------------

MEM, STK, BAG = "mem", "stk", "bag"


def mem_pt(p: Addr, vs) -> P.Resource:
    return inj(MEM, P.points_to(p.a, vs))


def mem_sigma() -> P.Resource:
    return inj(MEM, P.full(EPS))


def is_stk(h: Addr, l: List) -> P.Resource:
    return inj(STK, P.frag(P.finmap({h: P.Excl(l)})))


def stk_sigma() -> P.Resource:
    return inj(STK, P.full(EPS))


def is_bag(h: Addr, prop: str) -> P.Resource:
    return inj(BAG, P.frag(P.finmap({h: P.Ag(frozenset([prop]))})))


def bag_sigma() -> P.Resource:
    return inj(BAG, P.full(EPS))


def _auth_map(res_m, comp):
    """The authoritative map of a component inside a module resource."""
    a = proj(comp, res_m)
    if isinstance(a, P.Auth) and a.full is not None:
        return a.full
    return None


def _with_auth(res_m, comp, newmap):
    """res_m with the component's authoritative part replaced (fragment kept)."""
    a = proj(comp, res_m)
    fr = a.frag if isinstance(a, P.Auth) else EPS
    rest = {k: v for k, v in (res_m.entries if isinstance(res_m, P.FinMap) else ()) if k != comp}
    rest[comp] = P.Auth(newmap, fr)
    return P.finmap(rest)


def _map_get(m, k):
    return m.get(k) if isinstance(m, P.FinMap) else EPS


def _map_set(m, k, v):
    d = dict(m.entries) if isinstance(m, P.FinMap) else {}
    if v is None:
        d.pop(k, None)
    else:
        d[k] = v
    return P.finmap(d)


# -- Hoare example -----------------------------------------------------------

def _int_arg(x):
    if _args(x, 1) and isinstance(x.items[0], Int):
        return x.items[0].i
    return None


def s_f_hoare() -> SpecTable:
    return SpecTable({"F.f": spec_of_hl(lambda x: _int_arg(x) is not None and _int_arg(x) % 4 == 0,
                                        lambda r: isinstance(r, Int) and r.i % 4 == 1, "F.f")})


def s_main_hoare() -> SpecTable:
    return SpecTable({"Main.main": spec_of_hl(lambda x: True, lambda r: True, "Main.main")})


# -- Cannon ------------------------------------------------------------------

def s_cannon() -> SpecTable:
    fire = Spec("Cannon.fire", ((),),
                lambda a, x, xa, d, res: xa == x and res == P.BALL,
                lambda a, r, ra, res: ra == r and r == Int(1) and res == EPS,
                entry=lambda x, res_m: [((), x, None, P.BALL)],
                call=lambda xa, own: [((), xa, None, P.BALL)],
                ret=lambda a, r, res_f: [(r, EPS)],
                exit=lambda a, ra, res_m: [(ra, EPS)],
                res_m_exit=lambda a, res_m, r, res: [P.FIRED])
    return SpecTable({"Cannon.fire": fire})


def s_main_cannon() -> SpecTable:
    main = Spec("Main.main", ((),),
                lambda a, x, xa, d, res: xa == x and res == P.BALL,
                lambda a, r, ra, res: ra == r and res == EPS,
                entry=lambda x, res_m: [((), x, None, P.BALL)],
                call=lambda xa, own: [((), xa, None, P.BALL)])
    return SpecTable({"Main.main": main})


# -- Mem ---------------------------------------------------------------------

def _cells_of(p: Addr, n):
    return [(p.a.block, p.a.off + 8 * i) for i in range(n)]


def s_mem(dom: Domains = DOMAINS, cell_values=None) -> SpecTable:
    vals = tuple(cell_values) if cell_values is not None else tuple(Int(i) for i in dom.ints) + (UNDEF_ANY,)
    some = dom.measure

    def auth_cells(res_m):
        m = _auth_map(res_m, MEM)
        return m if m is not None else None

    # alloc
    def alloc_pre(n, x, xa, d, res):
        return _is_some(d) and x == List((Int(n),)) and n >= 0 and res == EPS

    def alloc_post(n, r, ra, res):
        if not isinstance(r, Addr) or r.a.kind != "heap" or r.a.off != 0:
            return False
        if n == 0:
            return res == EPS
        f = P.proj(MEM, res) if isinstance(res, P.FinMap) else None
        if not isinstance(f, P.Auth) or f.full is not None or not isinstance(f.frag, P.FinMap):
            return False
        return [k for k, _ in f.frag.entries] == _cells_of(r, n)

    def alloc_exit_m(n, res_m, r, res):
        m = auth_cells(res_m)
        if m is None or not isinstance(r, Addr):
            return []
        if any(k[0] == r.a.block for k, _ in (m.entries if isinstance(m, P.FinMap) else ())):
            return []
        for c in _cells_of(r, n):
            m = _map_set(m, c, P.Excl(UNDEF_ANY))
        return [_with_auth(res_m, MEM, m)]

    ns = tuple(range(0, dom.max_len + 1))
    alloc = Spec(
        "Mem.alloc", ns, alloc_pre, alloc_post,
        entry=lambda x, res_m: [(n, x, some, EPS) for n in ns if x == List((Int(n),))],
        call=lambda xa, own: [(n, xa, some, EPS) for n in ns if xa == List((Int(n),))],
        ret=lambda n, r, res_f: [(r, mem_pt(r, [UNDEF_ANY] * n))] if isinstance(r, Addr) else [],
        pure_ret=lambda n, xa, res_m: [Unit],
        exit=lambda n, ra, res_m: [(h, mem_pt(h, [UNDEF_ANY] * n)) for h in dom.handles],
        res_m_exit=alloc_exit_m)

    # free
    def free_pre(p, x, xa, d, res):
        if not (_is_some(d) and x == List((p,))):
            return False
        f = P.proj(MEM, res) if isinstance(res, P.FinMap) else None
        return (isinstance(f, P.Auth) and f.full is None and isinstance(f.frag, P.FinMap)
                and [k for k, _ in f.frag.entries] == [(p.a.block, p.a.off)])

    def cell_val(res_m, p):
        m = auth_cells(res_m)
        if m is None or not isinstance(p, Addr):
            return None
        e = _map_get(m, (p.a.block, p.a.off))
        return e.v if isinstance(e, P.Excl) else None

    def own_val(own, p):
        f = P.proj(MEM, own)
        if isinstance(f, P.Auth):
            e = _map_get(f.frag, (p.a.block, p.a.off))
            if isinstance(e, P.Excl):
                return [e.v]
        return list(vals)

    def free_exit_m(a, res_m, r, res):
        m = auth_cells(res_m)
        p = a
        if m is None or p is None:
            return []
        return [_with_auth(res_m, MEM, _map_set(m, (p.a.block, p.a.off), None))]

    def free_ptr(x):
        return x.items[0] if _args(x, 1) and isinstance(x.items[0], Addr) else None

    free = Spec(
        "Mem.free", (), free_pre,
        lambda a, r, ra, res: (r == UNDEF_ANY or isinstance(r, (Int, Addr))) and res == EPS,
        entry=lambda x, res_m: ([(free_ptr(x), x, some, mem_pt(free_ptr(x), [v]))]
                                if free_ptr(x) and (v := cell_val(res_m, free_ptr(x))) is not None else []),
        call=lambda xa, own: [(free_ptr(xa), xa, some, mem_pt(free_ptr(xa), [v]))
                              for v in own_val(own, free_ptr(xa))] if free_ptr(xa) else [],
        ret=lambda a, r, res_f: [(r, EPS)],
        pure_ret=lambda a, xa, res_m: [Int(0)],
        exit=lambda a, ra, res_m: [(ra, EPS)],
        res_m_exit=free_exit_m)

    # load / store
    def pv_pre(a, x, xa, d, res):
        p, v = a
        return _is_some(d) and x == List((p,)) and res == mem_pt(p, [v])

    def pv_post(a, r, ra, res):
        p, v = a
        return r == v and res == mem_pt(p, [v])

    load = Spec(
        "Mem.load", (), pv_pre, pv_post,
        entry=lambda x, res_m: ([((free_ptr(x), v), x, some, mem_pt(free_ptr(x), [v]))]
                                if free_ptr(x) and (v := cell_val(res_m, free_ptr(x))) is not None else []),
        call=lambda xa, own: [((free_ptr(xa), v), xa, some, mem_pt(free_ptr(xa), [v]))
                              for v in own_val(own, free_ptr(xa))] if free_ptr(xa) else [],
        ret=lambda a, r, res_f: [(r, mem_pt(a[0], [a[1]]))],
        pure_ret=lambda a, xa, res_m: [a[1]],
        exit=lambda a, ra, res_m: [(a[1], mem_pt(a[0], [a[1]]))],
        res_m_exit=lambda a, res_m, r, res: [])

    def st_args(x):
        if _args(x, 2) and isinstance(x.items[0], Addr):
            return x.items[0], x.items[1]
        return None

    def store_pre(a, x, xa, d, res):
        p, v = a
        f = P.proj(MEM, res) if isinstance(res, P.FinMap) else None
        return (_is_some(d) and x == List((p, v)) and isinstance(f, P.Auth) and f.full is None
                and isinstance(f.frag, P.FinMap) and [k for k, _ in f.frag.entries] == [(p.a.block, p.a.off)])

    def store_post(a, r, ra, res):
        p, v = a
        return isinstance(r, (Int, Addr)) and res == mem_pt(p, [v])

    def store_exit_m(a, res_m, r, res):
        p, v = a
        m = auth_cells(res_m)
        if m is None:
            return []
        c = (p.a.block, p.a.off)
        if _map_get(m, c) == EPS:
            return []
        return [_with_auth(res_m, MEM, _map_set(m, c, P.Excl(v)))]

    store = Spec(
        "Mem.store", (), store_pre, store_post,
        entry=lambda x, res_m: ([(st_args(x), x, some, mem_pt(st_args(x)[0], [w]))]
                                if st_args(x) and (w := cell_val(res_m, st_args(x)[0])) is not None else []),
        call=lambda xa, own: [(st_args(xa), xa, some, mem_pt(st_args(xa)[0], [w]))
                              for w in own_val(own, st_args(xa)[0])] if st_args(xa) else [],
        ret=lambda a, r, res_f: [(r, mem_pt(a[0], [a[1]]))],
        pure_ret=lambda a, xa, res_m: [Int(0)],
        exit=lambda a, ra, res_m: [(Int(0), mem_pt(a[0], [a[1]]))],
        res_m_exit=store_exit_m)

    return SpecTable({"Mem.alloc": alloc, "Mem.free": free, "Mem.load": load, "Mem.store": store})


# -- Stack -------------------------------------------------------------------

def s_stack1() -> SpecTable:
    return SpecTable({"Stack.new": STAR, "Stack.push": STAR, "Stack.pop": STAR})


def _h(x, n):
    if _args(x, n) and isinstance(x.items[0], Addr):
        return x.items[0]
    return None


def _stk_lookup(res, h):
    """List stored for handle h in the authoritative (or fragment) stack map."""
    a = proj(STK, res)
    if not isinstance(a, P.Auth):
        return None
    m = a.full if a.full is not None else a.frag
    e = _map_get(m, h)
    return e.v if isinstance(e, P.Excl) else None


def _stk_frag_lookup(own, h):
    a = proj(STK, own)
    if isinstance(a, P.Auth):
        e = _map_get(a.frag, h)
        if isinstance(e, P.Excl):
            return e.v
    return None


def _stk_set(res_m, h, l):
    m = _auth_map(res_m, STK)
    if m is None:
        return None
    return _with_auth(res_m, STK, _map_set(m, h, P.Excl(l)))


def s_stack2a(dom: Domains = DOMAINS) -> SpecTable:
    some = dom.measure
    E = List(())

    def new_pre(a, x, xa, d, res):
        return _is_some(d) and x == E and res == EPS

    def new_post(a, r, ra, res):
        return isinstance(r, Addr) and res == is_stk(r, E)

    def new_exit_m(a, res_m, r, res):
        m = _auth_map(res_m, STK)
        if m is None or _map_get(m, r) != EPS:
            return []
        return [_stk_set(res_m, r, E)]

    new = Spec("Stack.new", ((),), new_pre, new_post,
               entry=lambda x, res_m: [((), x, some, EPS)],
               call=lambda xa, own: [((), E, some, EPS)],
               ret=lambda a, r, res_f: [(r, is_stk(r, E))] if isinstance(r, Addr) else [],
               pure_ret=lambda a, xa, res_m: [Unit],
               exit=lambda a, ra, res_m: [(h, is_stk(h, E)) for h in dom.handles],
               res_m_exit=new_exit_m)

    def push_pre(a, x, xa, d, res):
        h, v, l = a
        return _is_some(d) and x == List((h, v)) and res == is_stk(h, l)

    def push_post(a, r, ra, res):
        h, v, l = a
        return isinstance(r, (Int, Addr)) and res == is_stk(h, List((v,) + l.items))

    def push_entry(x, res_m):
        h = _h(x, 2)
        l = _stk_lookup(res_m, h) if h else None
        return [((h, x.items[1], l), x, some, is_stk(h, l))] if l is not None else []

    def push_call(xa, own):
        h = _h(xa, 2)
        if h is None:
            return []
        l = _stk_frag_lookup(own, h)
        return [((h, xa.items[1], l), xa, some, is_stk(h, l))] if l is not None else []

    def push_exit_m(a, res_m, r, res):
        h, v, l = a
        n = _stk_set(res_m, h, List((v,) + l.items))
        return [n] if n is not None else []

    push = Spec("Stack.push", (), push_pre, push_post,
                entry=push_entry, call=push_call,
                ret=lambda a, r, res_f: [(r, is_stk(a[0], List((a[1],) + a[2].items)))],
                pure_ret=lambda a, xa, res_m: [Unit],
                exit=lambda a, ra, res_m: [(Int(0), is_stk(a[0], List((a[1],) + a[2].items)))],
                res_m_exit=push_exit_m)

    def head(l):
        return l.items[0] if l.items else Int(0)

    def tail(l):
        return List(l.items[1:])

    def pop_pre(a, x, xa, d, res):
        h, l = a
        return _is_some(d) and x == List((h,)) and res == is_stk(h, l)

    def pop_post(a, r, ra, res):
        h, l = a
        return r == head(l) and res == is_stk(h, tail(l))

    def pop_entry(x, res_m):
        h = _h(x, 1)
        l = _stk_lookup(res_m, h) if h else None
        return [((h, l), x, some, is_stk(h, l))] if l is not None else []

    def pop_call(xa, own):
        h = _h(xa, 1)
        if h is None:
            return []
        l = _stk_frag_lookup(own, h)
        return [((h, l), xa, some, is_stk(h, l))] if l is not None else []

    def pop_exit_m(a, res_m, r, res):
        h, l = a
        n = _stk_set(res_m, h, tail(l))
        return [n] if n is not None else []

    pop = Spec("Stack.pop", (), pop_pre, pop_post,
               entry=pop_entry, call=pop_call,
               ret=lambda a, r, res_f: [(r, is_stk(a[0], tail(a[1])))],
               pure_ret=lambda a, xa, res_m: [Unit],
               exit=lambda a, ra, res_m: [(head(a[1]), is_stk(a[0], tail(a[1])))],
               res_m_exit=pop_exit_m)
    return SpecTable({"Stack.new": new, "Stack.push": push, "Stack.pop": pop})


def _bag_lookup(res, h):
    a = proj(BAG, res)
    if not isinstance(a, P.Auth):
        return None
    m = a.full if a.full is not None else a.frag
    e = _map_get(m, h)
    if isinstance(e, P.Ag) and len(e.vs) == 1:
        return next(iter(e.vs))
    return None


def s_stack2b(dom: Domains = DOMAINS) -> SpecTable:
    some = dom.measure
    E = List(())
    vals = [Int(i) for i in dom.ints]

    def new_pre(a, x, xa, d, res):
        return _is_some(d) and x == E and res == EPS

    def new_post(prop, r, ra, res):
        return isinstance(r, Addr) and res == is_bag(r, prop)

    def new_exit_m(prop, res_m, r, res):
        m = _auth_map(res_m, BAG)
        if m is None or _map_get(m, r) != EPS:
            return []
        return [_with_auth(res_m, BAG, _map_set(m, r, P.Ag(frozenset([prop]))))]

    new = Spec("Stack.new", dom.props, new_pre, new_post,
               entry=lambda x, res_m: [(p, x, some, EPS) for p in dom.props],
               call=lambda xa, own: [(p, E, some, EPS) for p in dom.props],
               ret=lambda prop, r, res_f: [(r, is_bag(r, prop))] if isinstance(r, Addr) else [],
               pure_ret=lambda a, xa, res_m: [Unit],
               exit=lambda prop, ra, res_m: [(h, is_bag(h, prop)) for h in dom.handles],
               res_m_exit=new_exit_m)

    def push_pre(a, x, xa, d, res):
        h, v, prop = a
        return _is_some(d) and x == List((h, v)) and PROPS[prop](v) and res == is_bag(h, prop)

    def push_post(a, r, ra, res):
        h, v, prop = a
        return isinstance(r, (Int, Addr)) and res == is_bag(h, prop)

    def push_entry(x, res_m):
        h = _h(x, 2)
        prop = _bag_lookup(res_m, h) if h else None
        return [((h, x.items[1], prop), x, some, is_bag(h, prop))] if prop is not None else []

    def push_call(xa, own):
        h = _h(xa, 2)
        if h is None:
            return []
        p = _bag_lookup(own, h)
        return [((h, xa.items[1], p), xa, some, is_bag(h, p))] if p is not None and PROPS[p](xa.items[1]) else []

    push = Spec("Stack.push", (), push_pre, push_post,
                entry=push_entry, call=push_call,
                ret=lambda a, r, res_f: [(r, is_bag(a[0], a[2]))],
                pure_ret=lambda a, xa, res_m: [Unit],
                exit=lambda a, ra, res_m: [(Int(0), is_bag(a[0], a[2]))])

    def pop_pre(a, x, xa, d, res):
        h, prop = a
        return _is_some(d) and x == List((h,)) and res == is_bag(h, prop)

    def pop_post(a, r, ra, res):
        h, prop = a
        return (r == Int(0) or PROPS[prop](r)) and res == is_bag(h, prop)

    def pop_entry(x, res_m):
        h = _h(x, 1)
        prop = _bag_lookup(res_m, h) if h else None
        return [((h, prop), x, some, is_bag(h, prop))] if prop is not None else []

    def pop_call(xa, own):
        h = _h(xa, 1)
        if h is None:
            return []
        p = _bag_lookup(own, h)
        return [((h, p), xa, some, is_bag(h, p))] if p is not None else []

    pop = Spec("Stack.pop", (), pop_pre, pop_post,
               entry=pop_entry, call=pop_call,
               ret=lambda a, r, res_f: [(r, is_bag(a[0], a[1]))],
               pure_ret=lambda a, xa, res_m: [Unit],
               exit=lambda a, ra, res_m: [(v, is_bag(a[0], a[1])) for v in vals
                                          if v == Int(0) or PROPS[a[1]](v)])
    return SpecTable({"Stack.new": new, "Stack.push": push, "Stack.pop": pop})


# -- Echo --------------------------------------------------------------------

def _nonzero(l):
    return isinstance(l, List) and all(isinstance(v, Int) and v.i != 0 for v in l.items)


def is_estk(h, l):
    return is_stk(h, l) if _nonzero(l) else P.BAD


def s_echo(dom: Domains = DOMAINS, lists=None) -> SpecTable:
    lists = list(lists) if lists is not None else dom.lists(nonzero=True)

    def pre(h, x, xa, d, res):
        return d is None and x == List((h,)) and _nonzero(xa) and res == is_stk(h, xa)

    def post(h, r, ra, res):
        return isinstance(r, (Int, Addr)) and _nonzero(ra) and res == is_stk(h, ra)

    def entry(x, res_m):
        h = _h(x, 1)
        if h is None:
            return []
        return [(h, l, None, is_stk(h, l)) for l in lists]

    def call(xa, own):
        if not _nonzero(xa):
            return []
        return [(h, List((h,)), None, is_stk(h, xa)) for h in dom.handles
                if _stk_frag_lookup(own, h) == xa]

    def ret(h, r, res_f):
        return [(l, is_stk(h, l)) for l in lists]

    def exit_(h, ra, res_m):
        return [(Int(0), is_stk(h, ra))] if _nonzero(ra) else []

    inp = Spec("Echo.input", dom.handles, pre, post, entry=entry, call=call, ret=ret, exit=exit_)
    out = Spec("Echo.output", dom.handles, pre, post, entry=entry, call=call, ret=ret, exit=exit_)
    return SpecTable({"Echo.echo": STAR, "Echo.input": inp, "Echo.output": out})


# -- Repeat ------------------------------------------------------------------

def _iter(f, n, m):
    for _ in range(n):
        m = f(m)
    return m


def fptr_spec(fsem: str) -> Spec:
    """The callee shape expected by repeat: pure with measure Some w, returns fsem(m)."""
    f = FSEMS[fsem]
    return Spec(f"*f[{fsem}]", tuple(range(-2, 8)),
                lambda m, x, xa, d, res: x == List((Int(m),)) and d == OMEGA and res == EPS,
                lambda m, r, ra, res: r == Int(f(m)) and res == EPS)


def _fn_of(v):
    if isinstance(v, Addr) and v.a.kind == "fn":
        return v.a.block
    return None


def h_rp(sf: SpecTable, dom: Domains = DOMAINS, pcm=None) -> SpecTable:
    """Higher-order spec for RP.repeat, parameterised by the callee table sf."""
    pcm = pcm or P.Pcm("unit", (EPS, P.BAD))
    ok_cache = {}

    def callee_ok(fn, fsem):
        key = (fn, fsem)
        if key not in ok_cache:
            s = sf.get(fn)
            ok = False
            if s is not None:
                exp = fptr_spec(fsem)
                samples = [(List((Int(m),)), List((Int(m),)), OMEGA) for m in range(0, 4)]
                posts = [(Int(FSEMS[fsem](m)), Int(FSEMS[fsem](m))) for m in range(0, 4)]
                ok = stronger(pcm, s, exp, samples, posts)
            ok_cache[key] = ok
        return ok_cache[key]

    def d_ok(d, n):
        return d is not None and d >= Ordinal(1, n)

    def pre(a, x, xa, d, res):
        f, n, m, fsem = a
        return (x == List((f, Int(n), Int(m))) and n >= 0 and d_ok(d, n)
                and callee_ok(_fn_of(f), fsem) and res == EPS)

    def post(a, r, ra, res):
        f, n, m, fsem = a
        return r == Int(_iter(FSEMS[fsem], n, m)) and res == EPS

    def split(x):
        if _args(x, 3) and _fn_of(x.items[0]) and isinstance(x.items[1], Int) and isinstance(x.items[2], Int):
            return x.items[0], x.items[1].i, x.items[2].i
        return None

    def entry(x, res_m):
        s = split(x)
        if not s:
            return []
        f, n, m = s
        ds = [Ordinal(1, max(n, 0)), Ordinal(2, 0)]
        return [((f, n, m, fs), x, d, EPS) for fs in dom.fsems for d in ds]

    def call(xa, own):
        s = split(xa)
        if not s:
            return []
        f, n, m = s
        return [((f, n, m, fs), xa, Ordinal(1, max(n, 0)), EPS) for fs in dom.fsems]

    rep = Spec("RP.repeat", (), pre, post, entry=entry, call=call,
               ret=lambda a, r, res_f: [(r, EPS)],
               pure_ret=lambda a, xa, res_m: [Int(_iter(FSEMS[a[3]], a[1], a[2]))],
               exit=lambda a, ra, res_m: [(ra, EPS)])
    t = SpecTable({"RP.repeat": rep})
    t.callee_ok = callee_ok
    return t


def s_sc(dom: Domains = DOMAINS) -> SpecTable:
    def pre(m, x, xa, d, res):
        return x == List((Int(m),)) and _is_some(d) and res == EPS

    def post(m, r, ra, res):
        return r == Int(m + 1) and res == EPS

    def m_of(x):
        if _args(x, 1) and isinstance(x.items[0], Int):
            return x.items[0].i
        return None

    succ = Spec("SC.succ", tuple(range(-2, 8)), pre, post,
                entry=lambda x, res_m: [(m_of(x), x, OMEGA, EPS)] if m_of(x) is not None else [],
                call=lambda xa, own: [(m_of(xa), xa, OMEGA, EPS)] if m_of(xa) is not None else [],
                ret=lambda m, r, res_f: [(r, EPS)],
                pure_ret=lambda m, xa, res_m: [Int(m + 1)],
                exit=lambda m, ra, res_m: [(ra, EPS)])
    return SpecTable({"SC.succ": succ})


def s_ad() -> SpecTable:
    return SpecTable({"AD.add": STAR})
