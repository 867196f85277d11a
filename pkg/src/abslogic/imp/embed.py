"""IMP modules as module semantics.

Locals are IMP values (VInt, VPtr, VUndef).  Arguments and results cross
module boundaries upcast to AnyValue and are downcast back to ``val``;
a failed downcast is UB.
"""
from __future__ import annotations

from ..kernel import ModuleSem, Ret, Tau, bind, call, get_state, obs, put_state, ub
from ..values import (VAL, List, VInt, VPtr, VUndef, VUndefT, downcast, fnaddr,
                      unpack_args, upcast, wrap64)
from .ast import (AddrOf, Assign, BinOp, CallFn, CallPtr, Cmp, Free, If, Load, Malloc, Module, Num,
                  Skip, Store, Syscall, Var)


class ImpUB(Exception):
    pass


def _int(v):
    if isinstance(v, VInt):
        return v.i
    raise ImpUB(f"expected an integer, got {v!r}")


def _trunc_div(a, b):
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def binop(op, a, b):
    if isinstance(a, VUndefT) or isinstance(b, VUndefT):
        raise ImpUB("undefined value")
    if op == "+":
        if isinstance(a, VPtr) and isinstance(b, VInt):
            return VPtr(a.a.shift(b.i))
        if isinstance(a, VInt) and isinstance(b, VPtr):
            return VPtr(b.a.shift(a.i))
        return VInt(wrap64(_int(a) + _int(b)))
    if op == "-":
        if isinstance(a, VPtr) and isinstance(b, VInt):
            return VPtr(a.a.shift(-b.i))
        if isinstance(a, VPtr) and isinstance(b, VPtr):
            if a.a.kind != "heap" or a.a.block != b.a.block:
                raise ImpUB("pointer difference across blocks")
            return VInt(a.a.off - b.a.off)
        return VInt(wrap64(_int(a) - _int(b)))
    if op == "*":
        return VInt(wrap64(_int(a) * _int(b)))
    if op in ("/", "%"):
        x, y = _int(a), _int(b)
        if y == 0:
            raise ImpUB("division by zero")
        q = _trunc_div(x, y)
        return VInt(wrap64(q if op == "/" else x - q * y))
    if op == "==":
        return VInt(1 if equal(a, b) else 0)
    if op == "<":
        if isinstance(a, VPtr) and isinstance(b, VPtr):
            if a.a.kind != "heap" or a.a.block != b.a.block:
                raise ImpUB("ordering pointers of different blocks")
            return VInt(1 if a.a.off < b.a.off else 0)
        return VInt(1 if _int(a) < _int(b) else 0)
    raise ImpUB(f"unknown operator {op}")


def equal(a, b):
    """Equality; a pointer equals no integer, comparing with a nonzero one is UB."""
    if isinstance(a, VUndefT) or isinstance(b, VUndefT):
        raise ImpUB("comparing an undefined value")
    if isinstance(a, VInt) and isinstance(b, VInt):
        return a.i == b.i
    if isinstance(a, VPtr) and isinstance(b, VPtr):
        return a.a == b.a
    n = a if isinstance(a, VInt) else b
    if n.i == 0:
        return False
    raise ImpUB("comparing a pointer with a nonzero integer")


def eval_expr(e, env, glob):
    if isinstance(e, Num):
        return VInt(e.n)
    if isinstance(e, Var):
        if e.name in env:
            return env[e.name]
        if e.name in glob:
            return glob[e.name]
        raise ImpUB(f"unbound variable {e.name}")
    if isinstance(e, BinOp):
        return binop(e.op, eval_expr(e.l, env, glob), eval_expr(e.r, env, glob))
    raise TypeError(f"not an expression: {e!r}")


def _down(r):
    v = downcast(r, VAL)
    return ub() if v is None else Ret(v)


def _obs_arg(vs):
    if len(vs) == 1:
        return upcast(vs[0])
    return List(tuple(upcast(v) for v in vs))


class _Fun:
    def __init__(self, mod: Module, f, modname):
        self.f = f
        self.modname = modname
        self.globals = {g for g, _ in mod.locals}

    def __call__(self, x):
        f = self.f
        vals = unpack_args(x, len(f.params), ["val"] * len(f.params))
        if vals is None:
            return ub()
        env = {v: VUndef for v in f.vars}
        env.update(zip(f.params, vals))

        def done(env):
            return self.with_glob(lambda g: self.value(f.ret, env, g, lambda v: Ret(upcast(v))))
        return Tau(lambda: self.block(f.body, env, done))

    def with_glob(self, k):
        if not self.globals:
            return k({})
        return bind(get_state(), lambda st: k(dict(st)))

    def value(self, e, env, glob, k):
        try:
            v = eval_expr(e, env, glob)
        except ImpUB:
            return ub()
        return k(v)

    def values(self, es, env, glob, k):
        try:
            vs = [eval_expr(e, env, glob) for e in es]
        except ImpUB:
            return ub()
        return k(vs)

    def assign(self, x, v, env, k):
        if x is None:
            return k(env)
        if x in env:
            env2 = dict(env)
            env2[x] = v
            return k(env2)
        if x in self.globals:
            return bind(get_state(), lambda st: bind(
                put_state(tuple(sorted({**dict(st), x: v}.items()))), lambda _: k(env)))
        return ub()

    def block(self, ss, env, k):
        if not ss:
            return k(env)
        return self.stmt(ss[0], env, lambda env2: self.block(ss[1:], env2, k))

    def stmt(self, s, env, k):
        return self.with_glob(lambda g: self._stmt(s, env, g, k))

    def _call(self, x, fn, vs, env, k):
        return bind(call(fn, List(tuple(upcast(v) for v in vs))),
                    lambda r: bind(_down(r), lambda v: self.assign(x, v, env, k)))

    def _stmt(self, s, env, g, k):
        if isinstance(s, Skip):
            return k(env)
        if isinstance(s, Assign):
            return self.value(s.e, env, g, lambda v: self.assign(s.x, v, env, k))
        if isinstance(s, If):
            def branch(v):
                if not isinstance(v, VInt):
                    return ub()
                return self.block(s.then if v.i != 0 else s.els, env, k)
            return self.value(s.c, env, g, branch)
        if isinstance(s, CallFn):
            return self.values(s.args, env, g, lambda vs: self._call(s.x, s.fn, vs, env, k))
        if isinstance(s, CallPtr):
            def ind(fv):
                if not isinstance(fv, VPtr) or fv.a.kind != "fn":
                    return ub()
                return self.values(s.args, env, g, lambda vs: self._call(s.x, fv.a.block, vs, env, k))
            return self.value(s.f, env, g, ind)
        if isinstance(s, Syscall):
            return self.values(s.args, env, g, lambda vs: bind(
                obs(s.name, _obs_arg(vs)), lambda r: bind(_down(r), lambda v: self.assign(s.x, v, env, k))))
        if isinstance(s, AddrOf):
            return self.assign(s.x, VPtr(fnaddr(s.fn)), env, k)
        if isinstance(s, Malloc):
            return self.value(s.n, env, g, lambda v: self._call(s.x, "Mem.alloc", [v], env, k))
        if isinstance(s, Free):
            return self.value(s.p, env, g, lambda v: self._call(None, "Mem.free", [v], env, k))
        if isinstance(s, Load):
            return self.value(s.p, env, g, lambda v: self._call(s.x, "Mem.load", [v], env, k))
        if isinstance(s, Store):
            return self.values((s.p, s.v), env, g, lambda vs: self._call(None, "Mem.store", vs, env, k))
        if isinstance(s, Cmp):
            def c(vs):
                try:
                    r = VInt(1 if equal(vs[0], vs[1]) else 0)
                except ImpUB:
                    return ub()
                return self.assign(s.x, r, env, k)
            return self.values((s.a, s.b), env, g, c)
        raise TypeError(f"not a statement: {s!r}")


def embed(mod: Module, overrides: dict = None) -> ModuleSem:
    """Module semantics of an IMP module; ``overrides`` sets initial local values."""
    init = {g: VInt(n) for g, n in mod.locals}
    for g, v in (overrides or {}).items():
        if g not in init:
            raise KeyError(f"module {mod.name} has no local {g!r}")
        init[g] = v if isinstance(v, (VInt, VPtr)) else VInt(int(v))
    funs = {f"{mod.name}.{f.name}": _Fun(mod, f, mod.name) for f in mod.funs}
    return ModuleSem(mod.name, tuple(sorted(init.items())), funs)
