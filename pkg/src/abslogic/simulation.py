"""A bounded simulation game between an implementation and an abstraction.

A goal relates an implementation program and an abstract program under a
world.  Complete rules (abs take, impl choose, silent steps, state access)
are applied eagerly and spend a stutter budget; the remaining rules (abs
choose, impl take, and the lockstep Obs/Call/Ret rules) spend fuel.  Calls
to a function of the same module are inlined, so only calls leaving the
module are interaction points.

Verdicts are three-valued: Holds, Fails, FuelExhausted.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .behavior import DEFAULT, EnumConfig, check_refine
from .kernel import (TOP, Call, Choose, Finite, Get, GetCaller, Ipc, ModuleSem, Obs, Put, Ret, Take, Tau,
                     Vis, bind, call, choose, fmap, get_state, interpret, nb, obs, put_state, take, ub)
from .values import Int, List, Unit, show, to_json

HOLDS, FAILS, FUEL = "Holds", "Fails", "FuelExhausted"


def v_and(vs):
    seen_fuel = False
    for v in vs:
        r = v() if callable(v) else v
        if r == FAILS:
            return FAILS
        seen_fuel = seen_fuel or r == FUEL
    return FUEL if seen_fuel else HOLDS


def v_or(vs):
    seen_fuel = False
    for v in vs:
        r = v() if callable(v) else v
        if r == HOLDS:
            return HOLDS
        seen_fuel = seen_fuel or r == FUEL
    return FUEL if seen_fuel else FAILS


def _true(w, si, sa):
    return True


def _eq(a, b):
    return a == b


@dataclass
class SimConfig:
    """Worlds with a preorder, a relational invariant and the search bounds.

    returns         values an outside callee may return
    state_universe  extra (impl, abs) state pairs quantified over at entry and after calls
    args            fn -> arguments to check; each entry is a value or an (impl, abs) pair
    """
    worlds: tuple = (0,)
    leq: Callable = _eq
    invariant: Callable = _true
    fuel: int = 200
    stutter: int = 400
    returns: tuple = tuple(Int(i) for i in range(6))
    state_universe: tuple = ()
    args: dict = field(default_factory=dict)
    caller: str = TOP
    order: str = "abs-first"

    def __post_init__(self):
        ws = tuple(self.worlds)
        if not ws:
            raise ValueError("at least one world is required")
        for a in ws:
            if not self.leq(a, a):
                raise ValueError(f"world order is not reflexive at {a!r}")
            for b in ws:
                for c in ws:
                    if self.leq(a, b) and self.leq(b, c) and not self.leq(a, c):
                        raise ValueError(f"world order is not transitive at {a!r} <= {b!r} <= {c!r}")
        self.worlds = ws

    def above(self, w):
        return [w2 for w2 in self.worlds if self.leq(w, w2)]

    def with_(self, **kw) -> "SimConfig":
        d = dict(self.__dict__)
        d.update(kw)
        return SimConfig(**d)


TRIVIAL = SimConfig()


@dataclass
class SimStats:
    goals: int = 0
    syncs: int = 0


def _inline(mod: ModuleSem, fn, args, k):
    body = mod.funs[fn]
    h = {GetCaller: lambda e, s: Ret((mod.name, s))}
    return Tau(lambda: bind(fmap(interpret(body(args), h, None), lambda r: r[0]), k))


class _Game:
    def __init__(self, cfg: SimConfig, ec: EnumConfig, mi: ModuleSem, ma: ModuleSem, stats: SimStats):
        self.cfg, self.ec, self.mi, self.ma, self.stats = cfg, ec, mi, ma, stats

    # complete rewrites that need no branching; None when the side is at a branching or visible step
    def _quiet(self, side, p, s, mod):
        if isinstance(p, Tau):
            return p.next, s
        if not isinstance(p, Vis):
            return None
        e, t = p.e, type(p.e)
        if t is Get:
            return p.k(s), s
        if t is Put:
            return p.k(Unit), e.state
        if t is GetCaller:
            return p.k(self.cfg.caller), s
        if t is Ipc:
            return p.k(Unit), s
        if t is Call and mod is not None and e.fn in mod.funs:
            return _inline(mod, e.fn, e.args, p.k), s
        return None

    def solve(self, w, si, pi, sa, pa, fuel, stut):
        self.stats.goals += 1
        sides = ("abs", "impl") if self.cfg.order == "abs-first" else ("impl", "abs")
        while True:
            if stut < 0:
                return FUEL
            progressed = False
            for side in sides:
                if side == "abs":
                    q = self._quiet("abs", pa, sa, self.ma)
                    if q is not None:
                        pa, sa = q
                        stut -= 1
                        progressed = True
                        break
                    if isinstance(pa, Vis) and type(pa.e) is Take:
                        vs = self.ec.domain_values(pa.e.domain)
                        return v_and(lambda x=x, k=pa.k: self.solve(w, si, pi, sa, k(x), fuel, stut - 1)
                                     for x in vs)
                else:
                    q = self._quiet("impl", pi, si, self.mi)
                    if q is not None:
                        pi, si = q
                        stut -= 1
                        progressed = True
                        break
                    if isinstance(pi, Vis) and type(pi.e) is Choose:
                        vs = self.ec.domain_values(pi.e.domain)
                        return v_and(lambda x=x, k=pi.k: self.solve(w, si, k(x), sa, pa, fuel, stut - 1)
                                     for x in vs)
            if not progressed:
                break
        return self._step(w, si, pi, sa, pa, fuel)

    def _step(self, w, si, pi, sa, pa, fuel):
        cfg = self.cfg
        opts = []
        if isinstance(pi, Vis) and type(pi.e) is Take:
            opts += [lambda x=x, k=pi.k: self.solve(w, si, k(x), sa, pa, fuel - 1, cfg.stutter)
                     for x in self.ec.domain_values(pi.e.domain)]
        if isinstance(pa, Vis) and type(pa.e) is Choose:
            opts += [lambda x=x, k=pa.k: self.solve(w, si, pi, sa, k(x), fuel - 1, cfg.stutter)
                     for x in self.ec.domain_values(pa.e.domain)]
        stuck_i = isinstance(pi, Vis) and type(pi.e) is Take
        stuck_a = isinstance(pa, Vis) and type(pa.e) is Choose
        if stuck_i or stuck_a:
            if fuel <= 0:
                return FUEL
            return v_or(opts)
        if fuel <= 0:
            return FUEL
        self.stats.syncs += 1
        if isinstance(pi, Ret) and isinstance(pa, Ret):
            if pi.v != pa.v:
                return FAILS
            return HOLDS if any(cfg.invariant(w2, si, sa) for w2 in cfg.above(w)) else FAILS
        if not (isinstance(pi, Vis) and isinstance(pa, Vis)):
            return FAILS
        ei, ea = pi.e, pa.e
        if type(ei) is Obs and type(ea) is Obs:
            if ei.fn != ea.fn or ei.args != ea.args:
                return FAILS
            answers = self._answers(ei.fn)
            ki, ka = pi.k, pa.k
            return v_and(lambda r=r: self.solve(w, si, ki(r), sa, ka(r), fuel - 1, cfg.stutter) for r in answers)
        if type(ei) is Call and type(ea) is Call:
            if ei.fn != ea.fn or ei.args != ea.args:
                return FAILS
            return v_or(lambda w1=w1: self._after_call(w1, si, pi, sa, pa, fuel)
                        for w1 in cfg.above(w) if cfg.invariant(w1, si, sa))
        return FAILS

    def _after_call(self, w1, si, pi, sa, pa, fuel):
        cfg = self.cfg
        pairs = [(si, sa)] + [p for p in cfg.state_universe if p != (si, sa)]
        goals = []
        for w2 in cfg.above(w1):
            for si2, sa2 in pairs:
                if not cfg.invariant(w2, si2, sa2):
                    continue
                for r in cfg.returns:
                    goals.append(lambda w2=w2, si2=si2, sa2=sa2, r=r: self.solve(
                        w2, si2, pi.k(r), sa2, pa.k(r), fuel - 1, cfg.stutter))
        return v_and(goals)

    def _answers(self, fn):
        script = self.ec.scripts.get(fn)
        if script is not None:
            return tuple(dict.fromkeys(script))
        return self.ec.responders.get(fn, self.ec.default_response)


def _argpair(a):
    if isinstance(a, tuple) and len(a) == 2:
        return a
    return (a, a)


def sim_check(cfg: SimConfig, impl_mod: ModuleSem, abs_mod: ModuleSem, fn, argpairs,
              ec: EnumConfig = None, stats: SimStats = None) -> list:
    """Verdict per argument pair for ``fn`` of the two modules."""
    ec = ec or DEFAULT
    stats = stats if stats is not None else SimStats()
    g = _Game(cfg, ec, impl_mod, abs_mod, stats)
    out = []
    starts = [(impl_mod.init, abs_mod.init)] + [p for p in cfg.state_universe
                                                if p != (impl_mod.init, abs_mod.init)]
    for a in argpairs:
        ai, aa = _argpair(a)
        goals = []
        for si, sa in starts:
            for w in cfg.worlds:
                if cfg.invariant(w, si, sa):
                    goals.append(lambda w=w, si=si, sa=sa: g.solve(
                        w, si, _inline(impl_mod, fn, ai, Ret), sa, _inline(abs_mod, fn, aa, Ret),
                        cfg.fuel, cfg.stutter))
        v = v_and(goals) if goals else FAILS
        out.append({"arg": to_json(ai), "abs_arg": to_json(aa), "verdict": v})
    return out


def sim_module(cfg: SimConfig, impl_mod: ModuleSem, abs_mod: ModuleSem, ec: EnumConfig = None) -> dict:
    """Check every function listed in ``cfg.args``; returns per-function verdicts and a summary."""
    stats = SimStats()
    per = {}
    for fn, args in cfg.args.items():
        if fn not in impl_mod.funs or fn not in abs_mod.funs:
            continue
        per[fn] = sim_check(cfg, impl_mod, abs_mod, fn, args, ec, stats)
    verdict = v_and(r["verdict"] for rs in per.values() for r in rs)
    return {"module": impl_mod.name, "verdict": verdict, "functions": per,
            "goals": stats.goals, "syncs": stats.syncs}


# -- adequacy ----------------------------------------------------------------

def adequacy_probe(cfg: SimConfig, impl_mod: ModuleSem, abs_mod: ModuleSem, ctx, main, args,
                   budget: int, ec: EnumConfig = None, caller=TOP, abs_budget=None) -> dict:
    """Simulation verdict next to the trace oracle on the closed composition."""
    sim = sim_module(cfg, impl_mod, abs_mod, ec)
    tr = check_refine([impl_mod], [abs_mod], list(ctx), main, args, budget, ec, abs_budget, caller)
    s, t = sim["verdict"], tr["verdict"]
    if s == HOLDS and t != "Holds":
        status = "checker bug"
    elif s == HOLDS:
        status = "agree"
    elif s == FAILS and t == "Holds":
        status = "sim incomplete"
    elif s == FAILS:
        status = "agree"
    else:
        status = "inconclusive"
    return {"sim": s, "trace": t, "status": status, "sim_report": sim, "trace_report": tr}


# -- random module pairs -----------------------------------------------------

def random_tree(rng: random.Random, depth=3):
    """A small program tree over print/choose/take/ub/nb/state/call nodes."""
    if depth <= 0:
        return ("ret", rng.randrange(2))
    k = rng.randrange(9)
    sub = lambda: random_tree(rng, depth - 1)  # noqa: E731
    if k == 0:
        return ("ret", rng.randrange(2))
    if k == 1:
        return ("print", rng.randrange(2), sub())
    if k == 2:
        return ("choose", (sub(), sub()))
    if k == 3:
        return ("take", (sub(), sub()))
    if k == 4:
        return ("ub",) if rng.random() < 0.5 else ("nb",)
    if k == 5:
        return ("inc", sub())
    if k == 6:
        return ("ifst", sub(), sub())
    if k == 7:
        return ("call", sub(), sub())
    return ("print", rng.randrange(2), sub())


def mutate(rng: random.Random, t):
    """An abstraction candidate: widen with choose, give up with UB, or perturb."""
    r = rng.random()
    if r < 0.15:
        return ("ub",)
    if r < 0.3:
        return ("choose", (t, random_tree(rng, 2)))
    if r < 0.38:
        return random_tree(rng, 2)
    tag = t[0]
    if tag in ("ret", "ub", "nb"):
        return t
    if tag in ("print", "inc"):
        return t[:-1] + (mutate(rng, t[-1]),)
    if tag in ("choose", "take"):
        return (tag, tuple(mutate(rng, c) for c in t[1]))
    if tag in ("ifst", "call"):
        return (tag, mutate(rng, t[1]), mutate(rng, t[2]))
    return t


def tree_prog(t):
    tag = t[0]
    if tag == "ret":
        return Ret(Int(t[1]))
    if tag == "print":
        return bind(obs("print", Int(t[1])), lambda _: tree_prog(t[2]))
    if tag == "choose":
        return bind(choose(Finite(tuple(range(len(t[1]))))), lambda i: tree_prog(t[1][i]))
    if tag == "take":
        return bind(take(Finite(tuple(range(len(t[1]))))), lambda i: tree_prog(t[1][i]))
    if tag == "ub":
        return ub()
    if tag == "nb":
        return nb()
    if tag == "inc":
        return bind(get_state(), lambda s: bind(put_state(s + 1), lambda _: tree_prog(t[1])))
    if tag == "ifst":
        return bind(get_state(), lambda s: tree_prog(t[1] if s % 2 == 0 else t[2]))
    if tag == "call":
        return bind(call("Ctx.g", List(())), lambda r: tree_prog(t[1] if r == Int(0) else t[2]))
    raise ValueError(tag)


def tree_module(t, name="R") -> ModuleSem:
    return ModuleSem(name, 0, {f"{name}.f": lambda x: tree_prog(t)})


def random_ctx() -> ModuleSem:
    def g(x):
        return bind(choose(Finite((Int(0), Int(1)))), lambda r: bind(obs("ping", r), lambda _: Ret(r)))
    return ModuleSem("Ctx", Unit, {"Ctx.g": g})


def random_pair(seed: int):
    rng = random.Random(seed)
    t = random_tree(rng, 4)
    return t, mutate(rng, t)


def random_sim_config() -> SimConfig:
    return SimConfig(returns=(Int(0), Int(1)), args={"R.f": [Unit]}, fuel=60)


def show_tree(t) -> str:
    tag = t[0]
    if tag == "ret":
        return f"ret {t[1]}"
    if tag in ("ub", "nb"):
        return tag.upper()
    if tag == "print":
        return f"print {t[1]}; {show_tree(t[2])}"
    if tag in ("choose", "take"):
        return f"{tag}{{" + " | ".join(show_tree(c) for c in t[1]) + "}"
    if tag == "inc":
        return f"inc; {show_tree(t[1])}"
    return f"{tag}({show_tree(t[1])}, {show_tree(t[2])})"


__all__ = ["SimConfig", "SimStats", "sim_check", "sim_module", "adequacy_probe", "HOLDS", "FAILS", "FUEL",
           "random_pair", "tree_module", "random_ctx", "random_sim_config", "show", "TRIVIAL"]
