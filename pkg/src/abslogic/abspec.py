"""Pre-abstractions and their two readings: toAbs (erasure) and the abspec.

An abspec module keeps the pair ``(res_m, orig)`` as its state: the module's
own resource and the pre-abstraction's original state.  Inside a body the
interpretation threads ``(frm, own)``: the frame taken at the last ASSUME
and, as a hint only, the resources the function currently owns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import pcm as P
from .kernel import (BOOLS, Call, Finite, Get, Ipc, ModuleSem, Put, Ret, bind, call, choose,
                     drop_ipc, get_caller, get_state, interpret, nb, put_state, take, ub, while_loop)
from .pcm import EPS, add_all, valid
from .speclang import STAR, Spec, SpecTable
from .values import Unit, measure_lt, ord_pred, Ordinal


def UB_BODY(x):
    return ub()


def NB_BODY(x):
    return nb()


TRIVIAL = NB_BODY


@dataclass
class PreAbs:
    """Functions with a friend body and a context body, plus an initial state."""
    name: str
    init: object
    funs: dict   # fn -> (friend, context); bodies map an AnyValue to a Prog
    doc: dict = field(default_factory=dict)   # optional fn -> (friend text, context text)

    def friend(self, fn):
        return self.funs[fn][0]

    def context(self, fn):
        return self.funs[fn][1]


def same(body):
    """A pre-abstraction entry whose friend and context bodies coincide."""
    return (body, body)


def _frames_eps(base):
    return (EPS,)


def _res_f_default(own, res):
    out = [EPS]
    if own != EPS:
        out.append(own)
        m = P.minus(own, res) if res != EPS else None
        if m is not None and m not in out:
            out.append(m)
    return out


@dataclass
class AbsConfig:
    """Finite choices made by the abspec translation.

    frames(base)      candidate frames taken at every ASSUME (filtered by validity)
    ipc_menu          (fn, abstract args) pairs an IPC may call, or a dict
                      giving such a tuple per calling function
    ipc_ords          starting ordinals for the IPC loop counter
    res_f(own, res)   candidates for the resource a caller keeps across a call
    """
    frames: Callable = _frames_eps
    ipc_menu: tuple = ()
    ipc_ords: tuple = (Ordinal(0, 1),)
    res_f: Callable = _res_f_default

    def menu(self, fn):
        if isinstance(self.ipc_menu, dict):
            return tuple(self.ipc_menu.get(fn, ()))
        return tuple(self.ipc_menu)


DEFAULT_CFG = AbsConfig()


def pcm_frames(pcm_):
    """Frames drawn from a PCM universe, keeping those valid with the base."""
    univ = [r for r in pcm_._univ() if r != P.BAD]

    def frames(base):
        return tuple(f for f in univ if valid(P.add(base, f)))
    return frames


# -- ASSUME / GUARANTEE ------------------------------------------------------

def ASSUME(cands, res_f, cfg: AbsConfig):
    """Take ``(payload, res, frm)`` among candidates whose condition holds,
    assuming validity of ``res + res_f + res_m + frm``.  Candidates failing
    the condition would be UB branches, which are neutral under Take."""
    def k(st):
        res_m = st[0]
        opts = []
        for pl, res in cands:
            base = add_all(res, res_f, res_m)
            if base == P.BAD:
                continue
            for frm in cfg.frames(base):
                if valid(P.add(base, frm)):
                    opts.append((pl, res, frm))
        return take(Finite(tuple(opts)))
    return bind(get_state(), k)


def GUARANTEE(cands, frm, res_f_of, res_m_of):
    """Choose ``(payload, res, res_f, res_m')`` with the condition and validity
    guaranteed; store ``res_m'``.  Returns ``(payload, res, res_f)``."""
    def k(st):
        res_m, orig = st
        opts = []
        for pl, res in cands:
            for rf in res_f_of(res):
                for rm in (res_m,) + tuple(res_m_of(pl, res_m, res)):
                    if valid(add_all(res, rf, rm, frm)):
                        opts.append((pl, res, rf, rm))
        return bind(choose(Finite(tuple(opts))),
                    lambda o: bind(put_state((o[3], orig)), lambda _: Ret((o[0], o[1], o[2]))))
    return bind(get_state(), k)


# -- calls, IPC and bodies ---------------------------------------------------

def abspec_call(S: SpecTable, d, fo, fn, xa, cfg: AbsConfig = DEFAULT_CFG):
    """Call ``fn`` from an abspec body.  Returns ``Prog[(ra, (frm', own'))]``."""
    frm, own = fo
    spec = S.spec(fn)
    cands = [((a, x, d2), res) for a, x, d2, res in spec.call(xa, own)
             if spec.pre(a, x, xa, d2, res) and measure_lt(d2, d)]

    def after_g(g):
        (a, x, _d2), _res, rf = g
        return bind(call(fn, x), lambda r: after_call(a, r, rf))

    def after_call(a, r, rf):
        posts = [(ra, res) for ra, res in spec.ret(a, r, rf) if spec.post(a, r, ra, res)]
        return bind(ASSUME(posts, rf, cfg),
                    lambda t: Ret((t[0], (t[2], P.add(rf, t[1])))))

    return bind(GUARANTEE(cands, frm, lambda res: cfg.res_f(own, res), lambda pl, rm, res: ()), after_g)


def abspec_ipc(S: SpecTable, d, fo, cfg: AbsConfig = DEFAULT_CFG, fn=None):
    """Finitely many pure calls, bounded by a decreasing ordinal."""
    items = cfg.menu(fn)
    if not items:
        return Ret((Unit, fo))
    menu = Finite(items)

    def body(s):
        i, fo2 = s
        return bind(choose(menu), lambda m: bind(
            abspec_call(S, d, fo2, m[0], m[1], cfg),
            lambda r: bind(choose(Finite(tuple(ord_pred(i)))), lambda i2: Ret((i2, r[1])))))

    def start(i):
        return while_loop(lambda s: choose(BOOLS), body, (i, fo))

    return bind(choose(Finite(tuple(cfg.ipc_ords))), lambda i: bind(start(i), lambda s: Ret((Unit, s[1]))))


def abspec_body(S: SpecTable, d, fo, prog, cfg: AbsConfig = DEFAULT_CFG, fn=None):
    """Interpret calls and IPCs of a body; Get/Put reach the original state."""
    def h_get(e, fo2):
        return bind(get_state(), lambda st: Ret((st[1], fo2)))

    def h_put(e, fo2):
        return bind(get_state(), lambda st: bind(put_state((st[0], e.state)), lambda _: Ret((Unit, fo2))))

    handler = {
        Call: lambda e, fo2: abspec_call(S, d, fo2, e.fn, e.args, cfg),
        Ipc: lambda e, fo2: abspec_ipc(S, d, fo2, cfg, fn),
        Get: h_get,
        Put: h_put,
    }
    return interpret(prog, handler, fo)


def abspec_fun(S: SpecTable, s: Spec, body, cfg: AbsConfig = DEFAULT_CFG, fn=None):
    def run(x):
        def entry(st):
            cands = [((a, xa, d), res) for a, xa, d, res in s.entry(x, st[0]) if s.pre(a, x, xa, d, res)]
            return bind(ASSUME(cands, EPS, cfg), started)

        def started(t):
            (a, xa, d), res, frm = t
            fo = (frm, res)
            if d is None:
                return bind(abspec_body(S, d, fo, body(xa), cfg, fn), lambda r: finish(a, r[0], r[1]))
            return bind(abspec_ipc(S, d, fo, cfg, fn), lambda r: bind(get_state(), lambda st: bind(
                choose(Finite(tuple(s.pure_ret(a, xa, st[0])))), lambda ra: finish(a, ra, r[1]))))

        def finish(a, ra, fo):
            frm, own = fo

            def k(st):
                posts = [(r, res) for r, res in s.exit(a, ra, st[0]) if s.post(a, r, ra, res)]
                return bind(GUARANTEE(posts, frm, lambda res: cfg.res_f(own, res),
                                      lambda r, rm, res: s.res_m_exit(a, rm, r, res)),
                            lambda g: Ret(g[0]))
            return bind(get_state(), k)

        return bind(get_state(), entry)
    return run


def to_abspec(S: SpecTable, pair, s: Spec, cfg: AbsConfig = DEFAULT_CFG, fn=None):
    frd, ctx = pair
    f_frd = abspec_fun(S, s, frd, cfg, fn)
    f_ctx = abspec_fun(S, STAR, ctx, cfg, fn)

    def run(x):
        return bind(take(BOOLS), lambda is_friend: f_frd(x) if is_friend else f_ctx(x))
    return run


def build_abspec(S: SpecTable, pre: PreAbs, sigma, own: SpecTable = None,
                 cfg: AbsConfig = DEFAULT_CFG) -> ModuleSem:
    """The abspec module ``[S | (pre, sigma) : own]``."""
    own = S if own is None else own
    funs = {fn: to_abspec(S, pair, own.spec(fn), cfg, fn) for fn, pair in pre.funs.items()}
    return ModuleSem(pre.name, (sigma, pre.init), funs)


def to_abs(pre: PreAbs, N) -> ModuleSem:
    """Erasure: friends (callers whose module is in N) get the friend body."""
    N = frozenset(N)

    def mk(frd, ctx):
        def run(x):
            return bind(get_caller(), lambda mn: drop_ipc(frd(x) if mn in N else ctx(x)))
        return run
    return ModuleSem(pre.name, pre.init, {fn: mk(*pair) for fn, pair in pre.funs.items()})


def describe(pre: PreAbs, fn) -> dict:
    frd, ctx = pre.funs[fn]
    doc = pre.doc.get(fn, (None, None))

    def one(b, text):
        if b is UB_BODY:
            return "UB"
        if b is NB_BODY:
            return "NB"
        return text or "body"
    c = one(ctx, doc[1])
    if ctx is frd and ctx not in (UB_BODY, NB_BODY) and not doc[1]:
        c = "same as friend"
    return {"friend": one(frd, doc[0]), "context": c}


def erase_listing(pre: PreAbs, N) -> dict:
    return {"module": pre.name, "friends": sorted(N),
            "functions": {fn: describe(pre, fn) for fn in pre.funs}}


# -- the safe module ---------------------------------------------------------

def safe_module(name, ns, ns_i, args=(Unit,), rets=(Unit,)) -> ModuleSem:
    """Defines ``ns_i``; each function calls names in ``ns`` arbitrarily often
    with arbitrary arguments, then returns an arbitrary value.  Never UB."""
    names = Finite(tuple(ns))
    argd = Finite(tuple(args))
    retd = Finite(tuple(rets))

    def fun(x):
        def step(s):
            return bind(choose(names), lambda g: bind(choose(argd), lambda a: bind(call(g, a), lambda _: Ret(s))))
        return bind(while_loop(lambda s: choose(BOOLS), step, Unit), lambda _: choose(retd))
    return ModuleSem(name, Unit, {f: fun for f in ns_i})
