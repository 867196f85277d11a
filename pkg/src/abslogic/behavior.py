"""Bounded behaviours: Choose is union, Take is intersection, Partial closes everything."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field

from . import tracekernel as tk
from .kernel import (CHOOSE, ERROR, OBS, PARTIAL, TAKE, TERM, TOP, ClosedProgram, Described,
                     Finite, ModuleSem, advance, close, link)
from .values import AnyValue, Int, from_json, show, to_json

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class EnumConfigMissing(KeyError):
    """A Described domain had no candidate list."""


def _vals(xs):
    return tuple(x if isinstance(x, AnyValue) else from_json(x) for x in xs)


@dataclass
class EnumConfig:
    described: dict = field(default_factory=lambda: {"mem.fresh": tuple(Int(i) for i in range(4))})
    responders: dict = field(default_factory=dict)
    scripts: dict = field(default_factory=dict)
    default_response: tuple = (Int(0),)

    def domain_values(self, d):
        if isinstance(d, Finite):
            return d.values
        if isinstance(d, Described):
            try:
                return self.described[d.key]
            except KeyError:
                raise EnumConfigMissing(f"no candidates configured for {d.name} ({d.key})") from None
        raise TypeError(f"unknown domain {d!r}")

    def with_(self, **kw) -> "EnumConfig":
        d = dict(self.__dict__)
        d.update(kw)
        return EnumConfig(**d)

    @classmethod
    def from_dict(cls, data: dict) -> "EnumConfig":
        cfg = cls()
        if "fresh" in data:
            cfg.described["mem.fresh"] = _vals(data["fresh"])
        for k, vs in data.get("described", {}).items():
            cfg.described[k] = _vals(vs)
        cfg.responders = {k: _vals(v) for k, v in data.get("responders", {}).items()}
        cfg.scripts = {k: _vals(v) for k, v in data.get("scripts", {}).items()}
        if "default_response" in data:
            cfg.default_response = _vals(data["default_response"])
        return cfg

    @classmethod
    def load(cls, path) -> "EnumConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


DEFAULT = EnumConfig()


# -- behaviour sets ----------------------------------------------------------

class BehSet:
    __slots__ = ("traces",)

    def __init__(self, traces):
        self.traces = tk.normalize(traces)

    @property
    def is_top(self):
        return self.traces == (((), tk.UB, None),)

    def __eq__(self, other):
        return isinstance(other, BehSet) and self.traces == other.traces

    def __hash__(self):
        return hash(self.traces)

    def __len__(self):
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    def __repr__(self):
        return "BehSet(Top)" if self.is_top else f"BehSet({len(self.traces)} traces)"

    def complete(self):
        """Traces ending in Term or Error."""
        return [t for t in self.traces if t[1] in (tk.TERM, tk.ERROR)]

    def to_json(self):
        if self.is_top:
            return {"top": True, "traces": []}
        return {"top": False, "traces": [trace_json(t) for t in self.traces]}


TOP_SET = BehSet([((), tk.UB, None)])
NB_SET = BehSet([])


def trace_json(t):
    out = {"events": [{"fn": fn, "args": to_json(a), "ret": to_json(r)} for fn, a, r in t[0]],
           "terminal": t[1]}
    if t[1] == tk.TERM:
        out["value"] = to_json(t[2])
    return out


def trace_str(t) -> str:
    evs = ", ".join(f"{fn} {show(a)}" + ("" if r == Int(0) else f"->{show(r)}") for fn, a, r in t[0])
    end = {"term": f"Term {show(t[2])}" if t[2] is not None else "Term",
           "error": "Error", "partial": "Partial", "ub": "UB..."}[t[1]]
    return f"[{evs}] {end}"


@dataclass
class EnumStats:
    nodes: int = 0
    truncated: int = 0


def _enum(cp, cfg, budget, prefix, ec, stats):
    # unions stay unnormalised until a Take or the top level needs a canonical set
    stats.nodes += 1
    kind, payload, cfg, budget = advance(cp, cfg, budget)
    if kind == TERM:
        return (((prefix), tk.TERM, payload),)
    if kind == ERROR:
        return ((prefix, tk.ERROR, None),)
    if kind == PARTIAL:
        stats.truncated += 1
        return ((prefix, tk.PARTIAL, None),)
    if kind == CHOOSE:
        vs = ec.domain_values(payload)
        if not vs:
            return ((prefix, tk.PARTIAL, None),)
        acc = []
        for v in vs:
            acc.extend(_enum(cp, cfg.resume(v), budget, prefix, ec, stats))
        return acc
    if kind == TAKE:
        vs = ec.domain_values(payload)
        if not vs:
            return ((prefix, tk.UB, None),)
        floor = ((prefix, tk.PARTIAL, None),)
        res = None
        for v in vs:
            b = tk.normalize(_enum(cp, cfg.resume(v), budget, prefix, ec, stats))
            res = b if res is None else tk.intersect(res, b)
            if res == floor:
                break
        return res
    if kind == OBS:
        fn, args = payload.fn, payload.args
        script = ec.scripts.get(fn)
        if script is not None:
            i = cfg.count(fn)
            if i >= len(script):
                return ((prefix, tk.PARTIAL, None),)
            answers = (script[i],)
            cfg = cfg.bump(fn)
        else:
            answers = ec.responders.get(fn, ec.default_response)
        if not answers:
            return ((prefix, tk.PARTIAL, None),)
        acc = []
        for r in answers:
            acc.extend(_enum(cp, cfg.resume(r), budget, prefix + ((fn, args, r),), ec, stats))
        return acc
    raise AssertionError(kind)


def enumerate_beh(cp: ClosedProgram, budget: int, ec: EnumConfig = None, stats: EnumStats = None) -> BehSet:
    """All bounded traces of a closed program."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    ec = ec or DEFAULT
    stats = stats if stats is not None else EnumStats()
    return BehSet(_enum(cp, cp.start(), budget, (), ec, stats))


def program_module(prog_fn, name="P", init=None, extra=()):
    """Wrap a program factory (arg -> Prog) as the single function ``name.main``."""
    from .values import Unit
    return ModuleSem(name, Unit if init is None else init, {f"{name}.main": prog_fn, **dict(extra)})


def enumerate_prog(prog, budget: int, ec: EnumConfig = None) -> BehSet:
    """Behaviour of a standalone program (a Prog or a thunk returning one)."""
    from .kernel import Prog
    mod = program_module(lambda _a: prog if isinstance(prog, Prog) else prog())
    return enumerate_beh(close([mod], "P.main"), budget, ec)


# -- inclusion ---------------------------------------------------------------

@dataclass
class Verdict:
    holds: bool
    witness: tuple = None

    def __bool__(self):
        return self.holds

    @property
    def name(self):
        return "Holds" if self.holds else "Violation"

    def to_json(self):
        out = {"verdict": self.name}
        if self.witness is not None:
            out["witness"] = trace_json(self.witness)
        return out


def included(impl: BehSet, abs_: BehSet) -> Verdict:
    if abs_.is_top:
        return Verdict(True)
    w = tk.included(impl.traces, abs_.traces)
    return Verdict(w is None, w)


def check_refine(impl, abs_, ctx, main: str, args, budget: int, ec: EnumConfig = None,
                 abs_budget: int = None, caller: str = TOP) -> dict:
    """Bounded ``Beh(ctx . impl) <= Beh(ctx . abs)`` for each argument."""
    ec = ec or DEFAULT
    abs_budget = abs_budget or budget
    per, ok = [], True
    for a in args:
        si, sa = EnumStats(), EnumStats()
        bi = enumerate_beh(close(link(ctx, impl), main, a, caller), budget, ec, si)
        ba = enumerate_beh(close(link(ctx, abs_), main, a, caller), abs_budget, ec, sa)
        v = included(bi, ba)
        ok = ok and v.holds
        entry = {"arg": to_json(a), **v.to_json(), "impl_traces": len(bi), "abs_traces": len(ba),
                 "abs_truncated": sa.truncated > 0}
        if not v.holds:
            entry["witness_text"] = trace_str(v.witness)
        per.append(entry)
    report = {"verdict": "Holds" if ok else "Violation", "main": main, "budget": budget,
              "abs_budget": abs_budget, "results": per}
    if not ok and any(r["abs_truncated"] and r["verdict"] == "Violation" for r in per):
        report["note"] = "abstraction side hit the step budget; raise --abs-budget to rule out a false violation"
    return report


# -- single runs -------------------------------------------------------------

class ScriptExhausted(Exception):
    pass


def run_once(cp: ClosedProgram, budget: int, pick, ec: EnumConfig = None, on_obs=None):
    """Follow one path.  ``pick(kind, values)`` resolves Choose/Take.

    Returns a trace; UB is reported as Error, NB and script exhaustion as Partial.
    """
    ec = ec or DEFAULT
    cfg = cp.start()
    events = []
    while True:
        kind, payload, cfg, budget = advance(cp, cfg, budget)
        if kind == TERM:
            return (tuple(events), tk.TERM, payload)
        if kind == ERROR:
            return (tuple(events), tk.ERROR, None)
        if kind == PARTIAL:
            return (tuple(events), tk.PARTIAL, None)
        if kind in (CHOOSE, TAKE):
            vs = ec.domain_values(payload)
            if not vs:
                return (tuple(events), tk.ERROR if kind == TAKE else tk.PARTIAL, None)
            try:
                v = pick(kind, vs)
            except ScriptExhausted:
                return (tuple(events), tk.PARTIAL, None)
            cfg = cfg.resume(v)
            continue
        fn, args = payload.fn, payload.args
        script = ec.scripts.get(fn)
        if script is not None:
            i = cfg.count(fn)
            if i >= len(script):
                return (tuple(events), tk.PARTIAL, None)
            r = script[i]
            cfg = cfg.bump(fn)
        else:
            r = ec.responders.get(fn, ec.default_response)[0]
        events.append((fn, args, r))
        if on_obs:
            on_obs(fn, args, r)
        cfg = cfg.resume(r)
