"""Worked examples: IMP sources, pre-abstractions, spec tables and their checks.

Every example is an :class:`ExampleBundle`.  ``check_all`` runs, in order,
the per-module checks ``impl <= abspec``, the spec-erasure check
``abspecs <= toAbs`` and the end-to-end check ``impl <= toAbs``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources

from .. import pcm as P
from .. import speclang as S
from ..abspec import (DEFAULT_CFG, abspec_call, NB_BODY, UB_BODY, AbsConfig, PreAbs, build_abspec, pcm_frames,
                      same, to_abs)
from ..behavior import EnumConfig, check_refine, enumerate_beh
from ..imp import load_module, mem_impl, mem_preabs
from ..kernel import (TOP, Finite, close, link, ModuleSem, Ret, bind, call, choose, get_state, guarantee,
                      ipc, nb, obs, put_state, repeat_n, ub)
from ..simulation import SimConfig, adequacy_probe, sim_module
from ..values import INT64, LIST_INT64, Addr, fnaddr, Int, List, Ordinal, Unit, VInt, downcast, unpack_args

CORPUS = ("hoare_main", "hoare_f", "cannon_main", "cannon", "stack", "echo",
          "repeat_rp", "repeat_sc", "repeat_ad")


def source(name: str) -> str:
    return resources.files(__package__).joinpath("programs", f"{name}.imp").read_text()


def imp_module(name: str, **locals_) -> ModuleSem:
    return load_module(source(name), locals_ or None)


@dataclass
class ExampleBundle:
    name: str
    impl: dict                  # verified modules: name -> ModuleSem, in link order
    preabs: dict                # name -> PreAbs
    specs: dict                 # name -> SpecTable the module is verified against
    sigmas: dict                # name -> initial module resource
    friends: dict               # name -> modules that see the friend body
    main: tuple                 # (function, [arguments])
    enumcfg: EnumConfig = field(default_factory=EnumConfig)
    budget: int = 60
    simcfg: dict = None         # module -> SimConfig for the simulation game
    context: tuple = ()         # unverified modules linked on every side
    extra_specs: S.SpecTable = field(default_factory=S.SpecTable)
    abscfg: AbsConfig = DEFAULT_CFG
    abs_budget: int = None
    caller: str = TOP
    verify: tuple = None        # modules given a per-module check (default: all)
    doc: str = ""

    @property
    def table(self) -> S.SpecTable:
        return S.union(self.extra_specs, *self.specs.values())

    def abspec(self, m) -> ModuleSem:
        return build_abspec(self.table, self.preabs[m], self.sigmas.get(m, P.EPS),
                            self.specs[m], self.abscfg)

    def erased(self, m) -> ModuleSem:
        return to_abs(self.preabs[m], self.friends.get(m, {m}))

    def stack(self, kinds: dict = None):
        """The linked modules; ``kinds`` maps a module to "impl", "abspec" or "abs"."""
        kinds = kinds or {}
        mods = list(self.context)
        for m, sem in self.impl.items():
            k = kinds.get(m, "impl")
            mods.append(sem if k == "impl" else self.abspec(m) if k == "abspec" else self.erased(m))
        return mods

    def all_(self, kind):
        return {m: kind for m in self.impl}

    def refine(self, impl_kinds, abs_kinds, budget=None, abs_budget=None, args=None):
        fn, default_args = self.main
        return check_refine(self.stack(impl_kinds), self.stack(abs_kinds), [], fn,
                            default_args if args is None else args, budget or self.budget,
                            self.enumcfg, abs_budget or self.abs_budget, self.caller)


def check_all(b: ExampleBundle, budget=None) -> list:
    """Per-module checks, then spec erasure, then end-to-end; one report each."""
    out = []

    def run(name, kind, ik, ak):
        t = time.perf_counter()
        r = b.refine(ik, ak, budget)
        out.append({"check": name, "kind": kind, "verdict": r["verdict"],
                    "seconds": round(time.perf_counter() - t, 3), "report": r})

    for m in (b.verify if b.verify is not None else tuple(b.impl)):
        run(f"{m}: impl <= abspec", "module", {}, {m: "abspec"})
    run("abspecs <= toAbs", "erasure", b.all_("abspec"), b.all_("abs"))
    run("impl <= toAbs", "end-to-end", {}, b.all_("abs"))
    return out


def sim_bundle(b: ExampleBundle, simcfg: dict = None) -> dict:
    """Simulation game per configured module: impl against its abspec."""
    simcfg = simcfg if simcfg is not None else (b.simcfg or {})
    mods = {m: sim_module(cfg, b.impl[m], b.abspec(m), b.enumcfg) for m, cfg in simcfg.items()}
    verdicts = [r["verdict"] for r in mods.values()]
    goal = "Holds" if verdicts and all(v == "Holds" for v in verdicts) else (
        "Fails" if "Fails" in verdicts else "FuelExhausted")
    return {"example": b.name, "verdict": goal, "modules": mods,
            "goals": sum(r["goals"] for r in mods.values())}


def adequacy_bundle(b: ExampleBundle, simcfg: dict = None) -> list:
    """Simulation and trace verdicts per module, each in the bundle's closed context."""
    simcfg = simcfg if simcfg is not None else (b.simcfg or {})
    out = []
    for m, cfg in simcfg.items():
        ctx = list(b.context) + [sem for k, sem in b.impl.items() if k != m]
        r = adequacy_probe(cfg, b.impl[m], b.abspec(m), ctx, b.main[0], b.main[1], b.budget,
                           b.enumcfg, b.caller, b.abs_budget)
        out.append({"example": b.name, "module": m, "sim": r["sim"], "trace": r["trace"], "status": r["status"]})
    return out


# -- helpers for Python-written bodies ---------------------------------------

def _ints(x, n):
    a = unpack_args(x, n, [INT64] * n)
    return None if a is None else [v.i for v in a]


def _print_ret(v):
    return bind(obs("print", v), lambda _: Ret(v))


def ctx_module(name, fns: dict, init=Unit) -> ModuleSem:
    return ModuleSem(name, init, {f"{name}.{f}": body for f, body in fns.items()})


# -- Hoare -------------------------------------------------------------------

def _a_hoare_main(x):
    return bind(call("F.f", List((Int(40),))), lambda r: bind(obs("print", Int(42)), lambda _: Ret(Int(0))))


def _a_hoare_f(x):
    a = _ints(x, 1)
    if a is None:
        return ub()
    return _print_ret(Int((a[0] // 2 + 1) ** 2))


def hoare() -> ExampleBundle:
    pre_main = PreAbs("Main", Unit, {"Main.main": same(_a_hoare_main)},
                      doc={"Main.main": ("r := F.f(40); print(42); return 0", None)})
    pre_f = PreAbs("F", Unit, {"F.f": same(_a_hoare_f)},
                   doc={"F.f": ("r := (x/2 + 1)^2; print(r); return r", None)})
    return ExampleBundle(
        "hoare",
        impl={"Main": imp_module("hoare_main"), "F": imp_module("hoare_f")},
        preabs={"Main": pre_main, "F": pre_f},
        specs={"Main": S.s_main_hoare(), "F": S.s_f_hoare()},
        sigmas={},
        friends={"Main": {"Main", "F"}, "F": {"Main", "F"}},
        main=("Main.main", [List(())]), budget=60, caller="Main",
        simcfg={"Main": SimConfig(args={"Main.main": [List(())]}, caller="Main"),
                "F": SimConfig(args={"F.f": [List((Int(36),)), List((Int(40),))]}, caller="Main")},
        doc="F squares its halved argument; Main relies on odd results only")


def hoare_false_invariant() -> dict:
    """The Hoare simulation with an invariant that never holds: the game cannot close."""
    return {m: cfg.with_(invariant=lambda w, si, sa: False) for m, cfg in hoare().simcfg.items()}


# -- Cannon ------------------------------------------------------------------

def _cannon_main_body(n):
    def main(x):
        return bind(repeat_n(n, lambda i: bind(call("Cannon.fire", List(())), lambda r: obs("print", r))),
                    lambda _: Ret(Int(0)))
    return main


def _a_cannon_fire(x):
    return _print_ret(Int(1))


def _cannon_inv(w, si, sa):
    pw = dict(si).get("powder")
    return (pw == VInt(1) and sa[0] == P.READY) or (pw == VInt(0) and sa[0] == P.FIRED)


def _cannon_sim():
    fired = ((("powder", VInt(0)),), (P.FIRED, Unit))
    return {"Main": SimConfig(args={"Main.main": [List(())]}, caller="Main"),
            "Cannon": SimConfig(args={"Cannon.fire": [List(())]}, caller="Main", invariant=_cannon_inv,
                                state_universe=(fired,))}


def cannon(num_fire: int = 1) -> ExampleBundle:
    pre_main = PreAbs("Main", Unit, {"Main.main": (_cannon_main_body(num_fire), UB_BODY)},
                      doc={"Main.main": (f"repeat {num_fire}: print(Cannon.fire())", None)})
    pre_cannon = PreAbs("Cannon", Unit, {"Cannon.fire": (_a_cannon_fire, UB_BODY)},
                        doc={"Cannon.fire": ("print(1); return 1", None)})
    return ExampleBundle(
        f"cannon[{num_fire}]",
        impl={"Main": imp_module("cannon_main", fires=num_fire), "Cannon": imp_module("cannon")},
        preabs={"Main": pre_main, "Cannon": pre_cannon},
        specs={"Main": S.s_main_cannon(), "Cannon": S.s_cannon()},
        sigmas={"Main": P.EPS, "Cannon": P.READY},
        friends={"Main": {"Main", "Cannon"}, "Cannon": {"Main", "Cannon"}},
        main=("Main.main", [List(())]), budget=60, caller="Main",
        abscfg=AbsConfig(frames=pcm_frames(P.CANNON)),
        simcfg=_cannon_sim(),
        doc="the cannon holds one charge of powder; the ball resource allows a single shot")


# -- Mem ---------------------------------------------------------------------

def mem_client(values=(0, 1, 2)) -> ModuleSem:
    vs = Finite(tuple(Int(v) for v in values))

    def main(x):
        def with_p(p):
            q = Addr(p.a.shift(8))
            return bind(choose(vs), lambda v: bind(
                call("Mem.store", List((p, v))), lambda _: bind(
                    call("Mem.load", List((p,))), lambda r: bind(
                        obs("print", r), lambda _: bind(
                            call("Mem.free", List((p,))), lambda _: bind(
                                call("Mem.free", List((q,))), lambda _: Ret(Int(0))))))))
        return bind(call("Mem.alloc", List((Int(2),))),
                    lambda p: with_p(p) if isinstance(p, Addr) else ub())
    return ctx_module("Client", {"main": main})


def mem(dom: S.Domains = S.Domains(blocks=(0, 1), ints=(0, 1, 2))) -> ExampleBundle:
    ec = EnumConfig(described={"mem.fresh": tuple(Int(b) for b in dom.blocks)})
    return ExampleBundle(
        "mem",
        impl={"Mem": mem_impl()}, preabs={"Mem": mem_preabs()},
        specs={"Mem": S.s_mem(dom)}, sigmas={"Mem": S.mem_sigma()},
        friends={"Mem": set()},
        main=("Client.main", [Unit]), enumcfg=ec, budget=60,
        context=(mem_client(dom.ints),),
        doc="a client allocates two cells, stores, loads and frees them")


# -- Stack -------------------------------------------------------------------

def _pool_get(pool, h):
    for k, v in pool:
        if k == h:
            return v
    return None


def _pool_set(pool, h, l):
    d = dict(pool)
    d[h] = l
    return tuple(sorted(d.items(), key=lambda kv: kv[0]._key()))


def a1_stack(dom: S.Domains = S.DOMAINS) -> PreAbs:
    """Handles into a pool of lists; unknown handles are UB."""
    hs = Finite(dom.handles)

    def new(x):
        return bind(get_state(), lambda pool: bind(choose(hs), lambda h: bind(
            guarantee(_pool_get(pool, h) is None), lambda _: bind(
                put_state(_pool_set(pool, h, List(()))), lambda _: Ret(h)))))

    def push(x):
        a = x.items if isinstance(x, List) and len(x.items) == 2 else None
        if a is None:
            return ub()
        h, v = a

        def k(pool):
            l = _pool_get(pool, h)
            if l is None:
                return ub()
            return bind(put_state(_pool_set(pool, h, List((v,) + l.items))), lambda _: Ret(Int(0)))
        return bind(get_state(), k)

    def pop(x):
        h = x.items[0] if isinstance(x, List) and len(x.items) == 1 else None

        def k(pool):
            l = _pool_get(pool, h)
            if l is None:
                return ub()
            if not l.items:
                return Ret(Int(0))
            return bind(put_state(_pool_set(pool, h, List(l.items[1:]))), lambda _: Ret(l.items[0]))
        return bind(get_state(), k)

    text = {"Stack.new": "h := fresh handle; pool[h] := []; return h",
            "Stack.push": "pool[h]? := v :: pool[h]; return 0",
            "Stack.pop": "l := pool[h]?; match l { [] => 0 | v :: t => pool[h] := t; v }"}
    return PreAbs("Stack", (), {"Stack.new": same(new), "Stack.push": same(push), "Stack.pop": same(pop)},
                  doc={k: (v, None) for k, v in text.items()})


def a2_stack(dom: S.Domains = S.DOMAINS) -> PreAbs:
    """Friends must go through the pure spec; contexts get the pool semantics."""
    a1 = a1_stack(dom)
    return PreAbs("Stack", a1.init, {fn: (NB_BODY, a1.context(fn)) for fn in a1.funs},
                  doc={fn: ("NB", a1.doc[fn][0]) for fn in a1.funs})


def stack_client(values=(0, 1, 2), pops=3) -> ModuleSem:
    vs = Finite(tuple(Int(v) for v in values))

    def main(x):
        def pushes(h):
            return bind(choose(vs), lambda a: bind(call("Stack.push", List((h, a))), lambda _: bind(
                choose(vs), lambda b: bind(call("Stack.push", List((h, b))), lambda _: Ret(h)))))

        def popper(h):
            return repeat_n(pops, lambda i: bind(call("Stack.pop", List((h,))), lambda r: obs("print", r)))
        return bind(call("Stack.new", List(())), lambda h: bind(pushes(h), lambda h: bind(
            popper(h), lambda _: Ret(Int(0)))))
    return ctx_module("Client", {"main": main})


def _stack_ec(dom):
    return EnumConfig(described={"mem.fresh": tuple(Int(b) for b in dom.blocks)})


def stack1(dom: S.Domains = S.DOMAINS) -> ExampleBundle:
    return ExampleBundle(
        "stack1",
        impl={"Stack": imp_module("stack")}, preabs={"Stack": a1_stack(dom)},
        specs={"Stack": S.s_stack1()}, sigmas={},
        friends={"Stack": {"Mem", "Stack"}},
        main=("Client.main", [Unit]), enumcfg=_stack_ec(dom), budget=120,
        context=(mem_impl(), stack_client(dom.ints)),
        extra_specs=S.s_mem(dom),
        doc="linked-list stack over Mem refines a pool of lists")


def _stack2(name, table, sigma, dom, doc):
    a1 = a1_stack(dom)
    return ExampleBundle(
        name,
        impl={"Stack": to_abs(a1, {"Mem", "Stack"})}, preabs={"Stack": a2_stack(dom)},
        specs={"Stack": table}, sigmas={"Stack": sigma},
        friends={"Stack": {"Mem", "Stack"}},
        main=("Client.main", [Unit]), enumcfg=_stack_ec(dom), budget=120,
        context=(mem_impl(), stack_client(dom.ints)),
        extra_specs=S.s_mem(dom), doc=doc)


def stack2a(dom: S.Domains = S.DOMAINS) -> ExampleBundle:
    return _stack2("stack2a", S.s_stack2a(dom), S.stk_sigma(), dom,
                   "the pool semantics refines the exclusive-list stack spec")


def stack2b(dom: S.Domains = S.DOMAINS) -> ExampleBundle:
    return _stack2("stack2b", S.s_stack2b(dom), S.bag_sigma(), dom,
                   "the pool semantics refines the bag-of-property stack spec")


# -- Echo --------------------------------------------------------------------

def io_module() -> ModuleSem:
    def getint(x):
        return obs("getint", Unit)

    def putint(x):
        v = x.items[0] if isinstance(x, List) and len(x.items) == 1 else None
        if v is None:
            return ub()
        return bind(obs("putint", v), lambda _: Ret(Int(0)))
    return ctx_module("IO", {"getint": getint, "putint": putint})


def echo_driver() -> ModuleSem:
    def main(x):
        return bind(call("Echo.echo", List(())), lambda _: Ret(Int(0)))
    return ctx_module("Drv", {"main": main})


def _a_echo(x):
    def go(stk):
        l = downcast(stk, LIST_INT64)
        return nb() if l is None else call("Echo.output", stk)
    return bind(ipc(), lambda _: bind(call("Echo.input", List(())), go))


def _a_input(x):
    l = downcast(x, LIST_INT64)
    if l is None:
        return nb()

    def got(r):
        v = downcast(r, INT64)
        if v is None:
            return ub()
        if v == 0:
            return Ret(x)
        return bind(ipc(), lambda _: call("Echo.input", List((Int(v),) + x.items)))
    return bind(call("IO.getint", List(())), got)


def _a_output(x):
    l = downcast(x, LIST_INT64)
    if l is None:
        return nb()

    def rest(_):
        if not x.items:
            return Ret(List(()))
        return bind(call("IO.putint", List((x.items[0],))),
                    lambda _: call("Echo.output", List(x.items[1:])))
    return bind(ipc(), rest)


def a_echo() -> PreAbs:
    return PreAbs("Echo", Unit, {"Echo.echo": same(_a_echo), "Echo.input": (_a_input, UB_BODY),
                                 "Echo.output": (_a_output, UB_BODY)},
                  doc={"Echo.echo": ("stk :! list := Echo.input([]); Echo.output(stk)", None),
                       "Echo.input": ("v :? int := IO.getint(); if v = 0 then stk else Echo.input(v :: stk)", None),
                       "Echo.output": ("match stk { [] => [] | v :: t => IO.putint(v); Echo.output(t) }", None)})


def echo_menu(dom: S.Domains, values=(1, 2)):
    """Each Echo function may call the Stack operation its implementation uses."""
    hs = dom.handles
    values = tuple(v for v in values if v != 0)
    return {"Echo.echo": (("Stack.new", List(())),),
            "Echo.input": tuple(("Stack.push", List((h, Int(v)))) for h in hs for v in values),
            "Echo.output": tuple(("Stack.pop", List((h,))) for h in hs)}


def echo_domains(script) -> S.Domains:
    """Small domains covering a script: its values, its length, one block per node plus the header."""
    vals = tuple(sorted({v for v in script if v != 0}))
    return S.Domains(blocks=tuple(range(max(3, len(script)))), ints=(0,) + vals,
                     max_len=max(1, len(script) - 1))


def echo(script=(1, 0), dom: S.Domains = None) -> ExampleBundle:
    """The abspec checks grow exponentially with the domains, hence the short default script."""
    script = tuple(script)
    dom = dom or echo_domains(script)
    ec = EnumConfig(described={"mem.fresh": tuple(Int(b) for b in dom.blocks)},
                    scripts={"getint": tuple(Int(v) for v in script)})
    return ExampleBundle(
        "echo",
        impl={"Stack": imp_module("stack"), "Echo": imp_module("echo")},
        preabs={"Stack": a2_stack(dom), "Echo": a_echo()},
        specs={"Stack": S.s_stack2a(dom), "Echo": S.s_echo(dom)},
        sigmas={"Stack": S.stk_sigma(), "Echo": P.EPS},
        friends={"Stack": {"Echo"}, "Echo": {"Echo"}},
        main=("Drv.main", [Unit]), enumcfg=ec, budget=400,
        context=(mem_impl(), io_module(), echo_driver()),
        extra_specs=S.s_mem(dom),
        abscfg=AbsConfig(ipc_menu=echo_menu(dom, dom.ints)),
        verify=("Echo",),
        doc="reads nonzero integers until 0, then writes them back in reverse")


# -- Repeat ------------------------------------------------------------------

def _a_add(x):
    a = _ints(x, 2)
    if a is None:
        return ub()
    n, m = a
    return ub() if n < 0 else Ret(Int(n + m))


def repeat(args=None) -> ExampleBundle:
    if args is None:
        args = [List((Int(n), Int(m))) for n in (0, 1, 2) for m in (0, 3)]
    pre_rp = PreAbs("RP", Unit, {"RP.repeat": (NB_BODY, UB_BODY)})
    pre_sc = PreAbs("SC", Unit, {"SC.succ": (NB_BODY, UB_BODY)})
    pre_ad = PreAbs("AD", Unit, {"AD.add": same(_a_add)},
                    doc={"AD.add": ("assume(n >= 0); return n + m", None)})
    sc = S.s_sc()
    return ExampleBundle(
        "repeat",
        impl={"RP": imp_module("repeat_rp"), "SC": imp_module("repeat_sc"), "AD": imp_module("repeat_ad")},
        preabs={"RP": pre_rp, "SC": pre_sc, "AD": pre_ad},
        specs={"RP": S.h_rp(sc), "SC": sc, "AD": S.s_ad()},
        sigmas={},
        friends={"RP": {"RP", "SC", "AD"}, "SC": {"RP", "SC", "AD"}, "AD": {"RP", "SC", "AD"}},
        main=("AD.add", args), budget=80,
        doc="repeat applies a function pointer n times; add is repeat of succ")


def measure_probe(b: ExampleBundle, n=2, m=3, d=Ordinal(1, 1)):
    """Call RP.repeat from an abspec body at measure ``d``; too small a measure is NB."""
    body = abspec_call(b.table, d, (P.EPS, P.EPS), "RP.repeat",
                       List((Addr(fnaddr("SC.succ")), Int(n), Int(m))), b.abscfg)
    probe = ModuleSem("P", (P.EPS, Unit), {"P.main": lambda _a: bind(body, lambda r: Ret(r[0]))})
    return enumerate_beh(close(link(list(b.impl.values()), probe), "P.main", Unit, "P"), b.budget)


BUILDERS = {"hoare": hoare, "cannon": cannon, "mem": mem, "stack1": stack1, "stack2a": stack2a,
            "stack2b": stack2b, "echo": echo, "repeat": repeat}
NAMES = tuple(BUILDERS)


def build(name: str, **params) -> ExampleBundle:
    try:
        return BUILDERS[name](**params)
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(NAMES)}") from None
