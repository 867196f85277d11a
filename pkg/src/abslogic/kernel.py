"""Resumable event programs, modules, linking and the closed-program machine."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .values import AnyValue, Unit


# -- events ------------------------------------------------------------------

class Domain:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Finite(Domain):
    values: tuple

    def __post_init__(self):
        seen = []
        hs = set()
        for v in self.values:
            if v not in hs:
                hs.add(v)
                seen.append(v)
        object.__setattr__(self, "values", tuple(seen))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, slots=True)
class Described(Domain):
    name: str
    key: str


EMPTY = Finite(())
BOOLS = Finite((True, False))


def as_domain(d) -> Domain:
    if isinstance(d, Domain):
        return d
    return Finite(tuple(d))


class Event:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Choose(Event):
    domain: Domain


@dataclass(frozen=True, slots=True)
class Take(Event):
    domain: Domain


@dataclass(frozen=True, slots=True)
class Obs(Event):
    fn: str
    args: AnyValue


@dataclass(frozen=True, slots=True)
class Call(Event):
    fn: str
    args: object


@dataclass(frozen=True, slots=True)
class Get(Event):
    pass


@dataclass(frozen=True, slots=True)
class Put(Event):
    state: object


@dataclass(frozen=True, slots=True)
class GetCaller(Event):
    pass


@dataclass(frozen=True, slots=True)
class Ipc(Event):
    pass


# -- programs ----------------------------------------------------------------

class Prog:
    __slots__ = ()


class Ret(Prog):
    __slots__ = ("v",)

    def __init__(self, v=Unit):
        self.v = v

    def __repr__(self):
        return f"Ret({self.v!r})"


class Vis(Prog):
    __slots__ = ("e", "k")

    def __init__(self, e: Event, k: Callable[[object], Prog]):
        self.e = e
        self.k = k

    def __repr__(self):
        return f"Vis({self.e!r}, ...)"


class Tau(Prog):
    """A silent step; the successor is built on demand so loops stay finite."""
    __slots__ = ("_next",)

    def __init__(self, nxt):
        self._next = nxt

    @property
    def next(self) -> Prog:
        n = self._next
        if not isinstance(n, Prog):
            n = n()
            self._next = n
        return n

    def __repr__(self):
        return "Tau(...)"


def _force(p) -> Prog:
    return p if isinstance(p, Prog) else p()


def ret(v=Unit) -> Prog:
    return Ret(v)


def skip() -> Prog:
    return Ret(Unit)


def bind(p: Prog, k: Callable[[object], Prog]) -> Prog:
    if isinstance(p, Ret):
        return k(p.v)
    if isinstance(p, Vis):
        k0 = p.k
        return Vis(p.e, lambda a: bind(k0(a), k))
    if isinstance(p, Tau):
        return Tau(lambda: bind(p.next, k))
    raise TypeError(f"not a program: {p!r}")


def fmap(p: Prog, f) -> Prog:
    return bind(p, lambda v: Ret(f(v)))


def seq(*ps) -> Prog:
    """Run programs (or thunks producing programs) in order; keep the last value."""
    if not ps:
        return skip()
    first, rest = _force(ps[0]), ps[1:]
    if not rest:
        return first
    return bind(first, lambda _: seq(*rest))


def ite(c, t, e=None) -> Prog:
    e = skip if e is None else e
    if isinstance(c, Prog):
        return bind(c, lambda b: _force(t) if b else _force(e))
    return _force(t) if c else _force(e)


def while_loop(cond, body, init=Unit) -> Prog:
    """Loop-carried state ``s``: ``while cond(s): s := body(s)``; returns s.

    Each back-edge is a Tau so unfolding is paid for by the step budget.
    """
    def loop(s):
        c = cond(s)
        c = c if isinstance(c, Prog) else Ret(c)
        return bind(c, lambda b: bind(body(s), lambda s2: Tau(lambda: loop(s2))) if b else Ret(s))
    return loop(init)


def repeat_n(n: int, body) -> Prog:
    """``body`` is a program, a thunk, or a function of the iteration index."""
    def step(i):
        if callable(body) and not isinstance(body, Prog):
            try:
                p = body(i)
            except TypeError:
                p = body()
        else:
            p = body
        return bind(p, lambda _: Ret(i + 1))
    return fmap(while_loop(lambda i: i < n, step, 0), lambda _: Unit)


def choose(domain) -> Prog:
    return Vis(Choose(as_domain(domain)), Ret)


def take(domain) -> Prog:
    return Vis(Take(as_domain(domain)), Ret)


def obs(fn: str, args: AnyValue) -> Prog:
    return Vis(Obs(fn, args), Ret)


def call(fn: str, args) -> Prog:
    return Vis(Call(fn, args), Ret)


def get_state() -> Prog:
    return Vis(Get(), Ret)


def put_state(s) -> Prog:
    return Vis(Put(s), Ret)


def get_caller() -> Prog:
    return Vis(GetCaller(), Ret)


def ipc() -> Prog:
    return Vis(Ipc(), Ret)


def ub() -> Prog:
    return Vis(Take(EMPTY), Ret)


def nb() -> Prog:
    return Vis(Choose(EMPTY), Ret)


def assume(p: bool) -> Prog:
    return skip() if p else ub()


def guarantee(p: bool) -> Prog:
    return skip() if p else nb()


def interpret(p: Prog, handler: dict, s) -> Prog:
    """Stateful interpretation: selected events are replaced by the handler.

    ``handler`` maps an event class to ``f(event, state) -> Prog[(answer, state')]``.
    The result returns ``(value, final_state)``.
    """
    if isinstance(p, Ret):
        return Ret((p.v, s))
    if isinstance(p, Tau):
        return Tau(lambda: interpret(p.next, handler, s))
    h = handler.get(type(p.e))
    k = p.k
    if h is None:
        return Vis(p.e, lambda a: interpret(k(a), handler, s))
    return bind(h(p.e, s), lambda r: interpret(k(r[0]), handler, r[1]))


IPC_SKIP = {Ipc: lambda e, s: Ret((Unit, s))}


def drop_ipc(p: Prog) -> Prog:
    return fmap(interpret(p, IPC_SKIP, None), lambda r: r[0])


# -- modules -----------------------------------------------------------------

@dataclass(frozen=True)
class ModuleSem:
    name: str
    init: object
    funs: dict

    def __hash__(self):
        return id(self)


@dataclass(frozen=True)
class ModStack:
    mods: tuple = ()
    duplicates: tuple = ()

    def __iter__(self):
        return iter(self.mods)

    def __len__(self):
        return len(self.mods)

    @property
    def names(self):
        return [m.name for m in self.mods]

    @property
    def well_formed(self):
        return not self.duplicates


def _as_stack(x) -> ModStack:
    if isinstance(x, ModStack):
        return x
    if isinstance(x, ModuleSem):
        return stack_of([x])
    return stack_of(list(x))


def stack_of(mods: Iterable[ModuleSem]) -> ModStack:
    mods = tuple(mods)
    seen, dups = set(), []
    for m in mods:
        for f in m.funs:
            if f in seen and f not in dups:
                dups.append(f)
            seen.add(f)
    return ModStack(mods, tuple(dups))


def link(*parts) -> ModStack:
    mods = []
    for p in parts:
        mods.extend(_as_stack(p).mods)
    return stack_of(mods)


# -- closed programs ---------------------------------------------------------

TOP = "Top"


class Frame:
    __slots__ = ("k", "mod", "caller", "parent", "depth")

    def __init__(self, k, mod, caller, parent):
        self.k = k
        self.mod = mod
        self.caller = caller
        self.parent = parent
        self.depth = 1 if parent is None else parent.depth + 1


class Config:
    """One machine state: current program, module, caller, call stack and module states."""
    __slots__ = ("prog", "mod", "caller", "frames", "states", "counters")

    def __init__(self, prog, mod, caller, frames, states, counters=()):
        self.prog = prog
        self.mod = mod
        self.caller = caller
        self.frames = frames
        self.states = states
        self.counters = counters

    def with_prog(self, prog):
        return Config(prog, self.mod, self.caller, self.frames, self.states, self.counters)

    def resume(self, answer):
        return self.with_prog(self.prog.k(answer))

    def bump(self, fn):
        cs = dict(self.counters)
        cs[fn] = cs.get(fn, 0) + 1
        return Config(self.prog, self.mod, self.caller, self.frames, self.states, tuple(sorted(cs.items())))

    def count(self, fn):
        for f, c in self.counters:
            if f == fn:
                return c
        return 0


class ClosedProgram:
    def __init__(self, stack, main: str, arg=Unit, caller: str = TOP):
        self.stack = _as_stack(stack)
        self.main = main
        self.arg = arg
        self.caller = caller
        self.owner = {}
        self.index = {}
        for i, m in enumerate(self.stack.mods):
            self.index.setdefault(m.name, i)
            for f, body in m.funs.items():
                self.owner.setdefault(f, (i, body))
        if main not in self.owner:
            raise KeyError(f"main function {main!r} is not defined in the stack")

    def start(self) -> Config:
        i, body = self.owner[self.main]
        states = tuple(m.init for m in self.stack.mods)
        return Config(Tau(lambda: body(self.arg)), i, self.caller, None, states)

    def mod_name(self, i) -> str:
        return self.stack.mods[i].name


def close(stack, main: str, arg=Unit, caller: str = TOP) -> ClosedProgram:
    return ClosedProgram(stack, main, arg, caller)


# outcomes of advance()
TERM, ERROR, PARTIAL, CHOOSE, TAKE, OBS = "term", "error", "partial", "choose", "take", "obs"


def advance(cp: ClosedProgram, cfg: Config, budget: int):
    """Run deterministic steps until a branching point, an Obs, or an end.

    Returns ``(kind, payload, cfg, budget)``.  Tau, call and return steps
    cost one unit each; running out of budget yields PARTIAL.
    """
    while True:
        p = cfg.prog
        if isinstance(p, Ret):
            fr = cfg.frames
            if fr is None:
                return TERM, p.v, cfg, budget
            if budget <= 0:
                return PARTIAL, None, cfg, budget
            budget -= 1
            cfg = Config(fr.k(p.v), fr.mod, fr.caller, fr.parent, cfg.states, cfg.counters)
            continue
        if isinstance(p, Tau):
            if budget <= 0:
                return PARTIAL, None, cfg, budget
            budget -= 1
            cfg = cfg.with_prog(p.next)
            continue
        e = p.e
        t = type(e)
        if t is Choose:
            return CHOOSE, e.domain, cfg, budget
        if t is Take:
            return TAKE, e.domain, cfg, budget
        if t is Obs:
            return OBS, e, cfg, budget
        if t is Call:
            hit = cp.owner.get(e.fn)
            if hit is None:
                return ERROR, f"call to undefined function {e.fn}", cfg, budget
            if budget <= 0:
                return PARTIAL, None, cfg, budget
            budget -= 1
            i, body = hit
            caller_name = cp.mod_name(cfg.mod)
            frame = Frame(p.k, cfg.mod, cfg.caller, cfg.frames)
            cfg = Config(body(e.args), i, caller_name, frame, cfg.states, cfg.counters)
            continue
        if t is Get:
            cfg = cfg.with_prog(p.k(cfg.states[cfg.mod]))
            continue
        if t is Put:
            st = list(cfg.states)
            st[cfg.mod] = e.state
            cfg = Config(p.k(Unit), cfg.mod, cfg.caller, cfg.frames, tuple(st), cfg.counters)
            continue
        if t is GetCaller:
            cfg = cfg.with_prog(p.k(cfg.caller))
            continue
        if t is Ipc:
            cfg = cfg.with_prog(p.k(Unit))
            continue
        raise TypeError(f"unknown event {e!r}")
