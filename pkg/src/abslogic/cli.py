"""Command-line front end: ``abslog parse | run | beh | refine | sim | erase | example``.

Reports go to stdout as JSON (or to ``--out``).  ``run`` prints observable
events as they happen and exits with 0 on Term, 2 on Error and 3 on Partial
or an exhausted choice script.
"""
from __future__ import annotations

import json
import os
import random
import sys

import click

from . import examples as X
from .abspec import erase_listing
from .behavior import (EnumConfig, EnumConfigMissing, ScriptExhausted, check_refine, enumerate_beh,
                       run_once, trace_json, trace_str)
from .imp import ParseError, load_module, mem_impl, parse, render
from .kernel import TOP, Finite, bind, close, guarantee, assume, link, ret, skip, take, choose
from .simulation import (adequacy_probe, random_ctx, random_pair, random_sim_config,
                         tree_module)
from .tracekernel import ERROR, PARTIAL, TERM
from .values import Bool, Int, List, Unit, from_json, show

EXIT = {TERM: 0, ERROR: 2, PARTIAL: 3}
SIDES = ("impl", "abspec", "abs")
ENV_CONFIG = "ABSLOG_ENUM_CONFIG"


class CliError(click.ClickException):
    exit_code = 1


# -- shared plumbing ---------------------------------------------------------

def _emit(data, out):
    text = json.dumps(data, indent=2, sort_keys=True, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _config_data(path):
    path = path or os.environ.get(ENV_CONFIG)
    if not path:
        return None
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as e:
        raise CliError(f"cannot read enumeration config {path}: {e}")


def merge_config(ec: EnumConfig, data) -> EnumConfig:
    """Overlay a config file on an example's own enumeration config."""
    if not data:
        return ec
    known = {"fresh", "described", "responders", "scripts", "default_response"}
    bad = set(data) - known
    if bad:
        raise CliError(f"unknown enumeration config keys: {', '.join(sorted(bad))}")
    try:
        extra = EnumConfig.from_dict(data)
    except (ValueError, TypeError) as e:
        raise CliError(f"bad enumeration config: {e}")
    described = dict(ec.described)
    if "fresh" in data:
        described["mem.fresh"] = extra.described["mem.fresh"]
    described.update({k: extra.described[k] for k in data.get("described", {})})
    return ec.with_(described=described,
                    responders={**ec.responders, **extra.responders},
                    scripts={**ec.scripts, **extra.scripts},
                    default_response=extra.default_response if "default_response" in data
                    else ec.default_response)


def _param_value(text):
    if "," in text:
        return tuple(int(t) for t in text.split(",") if t.strip())
    try:
        return int(text)
    except ValueError:
        return text


def _bundle(name, params):
    kw = {}
    for p in params:
        k, sep, v = p.partition("=")
        if not sep:
            raise CliError(f"--param expects key=value, got {p!r}")
        kw[k.strip()] = _param_value(v.strip())
    try:
        return X.build(name, **kw)
    except KeyError as e:
        raise CliError(str(e.args[0]))
    except TypeError as e:
        raise CliError(f"bad parameters for {name}: {e}")


def _io_scripts(specs):
    out = {}
    for s in specs:
        fn, sep, vals = s.partition("=")
        if not sep:
            raise CliError(f"--io expects fn=v1,v2,..., got {s!r}")
        try:
            out[fn] = tuple(Int(int(v)) for v in vals.split(",") if v.strip())
        except ValueError:
            raise CliError(f"--io values must be integers: {s!r}")
    return out


def _load_files(files):
    mods = []
    for f in files:
        try:
            with open(f) as fh:
                mods.append(load_module(fh.read()))
        except ParseError as e:
            raise CliError(f"{f}: {e}")
        except OSError as e:
            raise CliError(str(e))
    return mods


def _file_context(mods):
    names = {m.name for m in mods}
    ctx = [] if "Mem" in names else [mem_impl()]
    if "IO" not in names:
        ctx.append(X.io_module())
    return ctx


def _arg(values):
    try:
        return List(tuple(from_json(json.loads(v)) for v in values))
    except ValueError as e:
        raise CliError(f"bad --arg: {e}")


def _target(example, params, files, main, args, side, enum_config, io=()):
    """The (stack, main, argument list, caller, enum config) a command works on."""
    data = _config_data(enum_config)
    if example:
        b = _bundle(example, params)
        stack = link(b.stack(b.all_(side)))
        fn, default = b.main
        argl = [_arg(args)] if args else default
        ec, caller = b.enumcfg, b.caller
        fn = main or fn
    else:
        if not files:
            raise CliError("give IMP files or --example NAME")
        if not main:
            raise CliError("--main is required with IMP files")
        if side != "impl":
            raise CliError("only the impl side exists for plain IMP files")
        mods = _load_files(files)
        stack = link(_file_context(mods), mods)
        fn, argl, ec, caller = main, [_arg(args)], EnumConfig(), TOP
    ec = merge_config(ec, data)
    if io:
        ec = ec.with_(scripts={**ec.scripts, **_io_scripts(io)})
    if not stack.well_formed:
        raise CliError(f"functions defined twice: {', '.join(stack.duplicates)}")
    return stack, fn, argl, caller, ec


def example_options(f):
    f = click.option("--example", "example", default=None, help="Example bundle name.")(f)
    f = click.option("--param", "params", multiple=True, metavar="KEY=VALUE",
                     help="Bundle parameter, e.g. num_fire=2 or script=1,2,0.")(f)
    return f


def config_options(f):
    f = click.option("--enum-config", "enum_config", type=click.Path(dir_okay=False), default=None,
                     help=f"JSON enumeration config (falls back to ${ENV_CONFIG}).")(f)
    f = click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                     help="Write the JSON report here instead of stdout.")(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Check bounded refinement between module implementations and abstractions."""


# -- parse -------------------------------------------------------------------

@main.command("parse")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Print a JSON summary instead of the source.")
def cmd_parse(files, as_json):
    """Validate IMP files and pretty-print them."""
    summary = []
    for f in files:
        with open(f) as fh:
            src = fh.read()
        try:
            m = parse(src)
        except ParseError as e:
            raise CliError(f"{f}: {e}")
        text = render(m)
        if as_json:
            summary.append({"file": f, "module": m.name, "functions": [d.name for d in m.funs],
                            "source": text})
        else:
            click.echo(text, nl=False)
    if as_json:
        _emit(summary, None)


# -- run ---------------------------------------------------------------------

def _label(v):
    if v is True or v is False:
        return "true" if v else "false"
    return show(v)


def _match(token, values):
    """A value given as an integer, a boolean or ``#index`` into the menu."""
    token = token.strip()
    if token.startswith("#"):
        try:
            i = int(token[1:])
        except ValueError:
            return None
        return values[i] if 0 <= i < len(values) else None
    for v in values:
        if _label(v) == token.lower():
            return v
    return None


class Prompter:
    """Ask on the terminal; numbers, true/false, or #index pick from the menu."""

    def __init__(self, stream=None):
        self.stream = stream

    def __call__(self, kind, values):
        who = "choose" if kind == "choose" else "take"
        menu = "  ".join(f"#{i}={_label(v)}" for i, v in enumerate(values))
        while True:
            try:
                text = click.prompt(f"{who} [{menu}]", err=True, prompt_suffix=" ")
            except (click.Abort, EOFError):
                raise ScriptExhausted()
            v = _match(text, values)
            if v is not None:
                return v
            click.echo(f"  not one of the options: {text!r}", err=True)


class Scripted:
    """Answers from a file, in order; running out ends the run as Partial."""

    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.i = 0

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            text = fh.read()
        try:
            data = json.loads(text)
            tokens = [_label(from_json(x)) if not isinstance(x, str) else x for x in data]
        except ValueError:
            tokens = text.split()
        return cls(tokens)

    def __call__(self, kind, values):
        if self.i >= len(self.tokens):
            raise ScriptExhausted()
        tok = self.tokens[self.i]
        self.i += 1
        v = _match(tok, values)
        if v is None:
            raise CliError(f"choice script entry {self.i} ({tok!r}) is not among "
                           f"{', '.join(_label(x) for x in values)}")
        return v


class Seeded:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def __call__(self, kind, values):
        return self.rng.choice(list(values))


@main.command("run")
@click.argument("files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@example_options
@click.option("--main", "main_fn", default=None, help="Entry function, e.g. Main.main.")
@click.option("--arg", "args", multiple=True, help="Argument (JSON); repeat for several.")
@click.option("--side", type=click.Choice(SIDES), default="impl", show_default=True,
              help="For examples: implementation, abspec or erased abstraction.")
@click.option("--script", "script", type=click.Path(exists=True, dir_okay=False), default=None,
              help="File of choices (JSON list or whitespace separated).")
@click.option("--seed", type=int, default=None, help="Resolve choices at random with this seed.")
@click.option("--io", "io", multiple=True, metavar="FN=V1,V2", help="Scripted answers to an observable call.")
@click.option("--budget", type=int, default=10000, show_default=True)
@config_options
def cmd_run(files, example, params, main_fn, args, side, script, seed, io, budget, enum_config, out):
    """Execute one path; Choose/Take are resolved by a prompt, a script or a seed."""
    stack, fn, argl, caller, ec = _target(example, params, files, main_fn, args, side, enum_config, io)
    if script and seed is not None:
        raise CliError("--script and --seed are exclusive")
    pick = Scripted.load(script) if script else Seeded(seed) if seed is not None else Prompter()

    def on_obs(f, a, r):
        click.echo(f"{f} {show(a)}" + ("" if r == Int(0) else f" -> {show(r)}"))
    try:
        t = run_once(close(stack, fn, argl[0], caller), budget, pick, ec, on_obs)
    except EnumConfigMissing as e:
        raise CliError(str(e.args[0]))
    end = trace_str(t).rsplit("] ", 1)[1]
    click.echo(end if t[1] != PARTIAL else "Partial (budget, NB or no more choices)")
    if out:
        _emit(trace_json(t), out)
    sys.exit(EXIT.get(t[1], 2))


# -- beh ---------------------------------------------------------------------

def _demo(name):
    body = {"guarantee-false": lambda: guarantee(False),
            "assume-false": lambda: assume(False),
            "guarantee-assume": lambda: bind(choose(Finite((True, False))),
                                             lambda p: bind(guarantee(p), lambda _: assume(p))),
            "skip": skip,
            "take-bool": lambda: take(Finite((Bool(True), Bool(False))))}[name]
    from .kernel import ModuleSem
    return link(ModuleSem("Demo", Unit, {"Demo.main": lambda _x: bind(body(), lambda _: ret(Int(0)))}))


DEMOS = ("guarantee-false", "assume-false", "guarantee-assume", "skip", "take-bool")


@main.command("beh")
@click.argument("files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@example_options
@click.option("--demo", type=click.Choice(DEMOS), default=None, help="A built-in one-line program.")
@click.option("--main", "main_fn", default=None)
@click.option("--arg", "args", multiple=True)
@click.option("--side", type=click.Choice(SIDES), default="impl", show_default=True)
@click.option("--io", "io", multiple=True, metavar="FN=V1,V2")
@click.option("--budget", type=int, default=60, show_default=True)
@config_options
def cmd_beh(files, example, params, demo, main_fn, args, side, io, budget, enum_config, out):
    """Enumerate the bounded behaviours of a closed program, canonically ordered."""
    if demo:
        stack, fn, argl, caller = _demo(demo), "Demo.main", [Unit], TOP
        ec = merge_config(EnumConfig(), _config_data(enum_config))
    else:
        stack, fn, argl, caller, ec = _target(example, params, files, main_fn, args, side, enum_config, io)
    res = []
    try:
        for a in argl:
            bs = enumerate_beh(close(stack, fn, a, caller), budget, ec)
            res.append({"arg": show(a), **bs.to_json()})
    except EnumConfigMissing as e:
        raise CliError(str(e.args[0]))
    _emit({"main": fn, "budget": budget, "behaviours": res}, out)


# -- refine ------------------------------------------------------------------

@main.command("refine")
@example_options
@click.option("--impl", "impl_side", type=click.Choice(SIDES), default="impl", show_default=True)
@click.option("--abs", "abs_side", type=click.Choice(SIDES), default="abs", show_default=True)
@click.option("--module", "module", default=None, help="Swap only this module; others stay impl.")
@click.option("--impl-file", "impl_files", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--abs-file", "abs_files", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--main", "main_fn", default=None)
@click.option("--arg", "args", multiple=True)
@click.option("--budget", type=int, default=None)
@click.option("--abs-budget", type=int, default=None)
@config_options
def cmd_refine(example, params, impl_side, abs_side, module, impl_files, abs_files, main_fn, args,
               budget, abs_budget, enum_config, out):
    """Bounded check that every implementation trace is allowed by the abstraction."""
    data = _config_data(enum_config)
    if example:
        b = _bundle(example, params)
        b.enumcfg = merge_config(b.enumcfg, data)
        mods = [module] if module else list(b.impl)
        if module and module not in b.impl:
            raise CliError(f"{example} has no module {module}")
        ik = {m: impl_side for m in mods}
        ak = {m: abs_side for m in mods}
        report = b.refine(ik, ak, budget, abs_budget, [_arg(args)] if args else None)
    else:
        if not (impl_files and abs_files and main_fn):
            raise CliError("give --example NAME, or --impl-file, --abs-file and --main")
        impl, abs_ = _load_files(impl_files), _load_files(abs_files)
        ctx = _file_context(impl + abs_)
        report = check_refine(impl, abs_, ctx, main_fn, [_arg(args)], budget or 60,
                              merge_config(EnumConfig(), data), abs_budget)
    _emit(report, out)
    sys.exit(0 if report["verdict"] == "Holds" else 1)


# -- sim ---------------------------------------------------------------------

@main.command("sim")
@example_options
@click.option("--module", "module", default=None)
@click.option("--false-invariant", is_flag=True, help="Hoare only: an invariant that never holds.")
@click.option("--adequacy", is_flag=True, help="Also run the trace oracle and compare.")
@click.option("--random", "rand", type=int, default=None, metavar="SEED",
              help="A random pair of module trees instead of an example.")
@config_options
def cmd_sim(example, params, module, false_invariant, adequacy, rand, enum_config, out):
    """Play the simulation game per function and summarise the goal."""
    data = _config_data(enum_config)
    if rand is not None:
        ti, ta = random_pair(rand)
        r = adequacy_probe(random_sim_config(), tree_module(ti), tree_module(ta), [random_ctx()],
                           "R.f", [Unit], 40, merge_config(EnumConfig(), data))
        _emit({"seed": rand, "sim": r["sim"], "trace": r["trace"], "status": r["status"],
               "report": r["sim_report"]}, out)
        sys.exit(0 if r["sim"] == "Holds" else 1)
    if not example:
        raise CliError("give --example NAME or --random SEED")
    b = _bundle(example, params)
    b.enumcfg = merge_config(b.enumcfg, data)
    cfgs = b.simcfg or {}
    if false_invariant:
        if example != "hoare":
            raise CliError("--false-invariant is only defined for hoare")
        cfgs = X.hoare_false_invariant()
    if module:
        if module not in cfgs:
            raise CliError(f"no simulation config for module {module}")
        cfgs = {module: cfgs[module]}
    if not cfgs:
        raise CliError(f"{example} has no simulation config; use refine instead")
    if adequacy:
        rows = X.adequacy_bundle(b, cfgs)
        _emit({"example": b.name, "modules": rows}, out)
        sys.exit(0 if all(r["status"] != "checker bug" for r in rows) else 1)
    report = X.sim_bundle(b, cfgs)
    _emit(report, out)
    sys.exit(0 if report["verdict"] == "Holds" else 1)


# -- erase -------------------------------------------------------------------

@main.command("erase")
@example_options
@click.option("--module", "module", default=None)
@config_options
def cmd_erase(example, params, module, enum_config, out):
    """List what spec erasure keeps: friend bodies for friends, context bodies otherwise."""
    if not example:
        raise CliError("--example is required")
    b = _bundle(example, params)
    mods = [module] if module else list(b.preabs)
    if module and module not in b.preabs:
        raise CliError(f"{example} has no module {module}")
    _emit({"example": b.name,
           "modules": [erase_listing(b.preabs[m], b.friends.get(m, {m})) for m in mods]}, out)


# -- example -----------------------------------------------------------------

@main.command("example")
@click.argument("name", required=False)
@click.option("--param", "params", multiple=True, metavar="KEY=VALUE")
@click.option("--budget", type=int, default=None)
@click.option("--sim", "with_sim", is_flag=True, help="Also play the simulation game where configured.")
@click.option("--list", "listing", is_flag=True, help="List the bundles.")
@config_options
def cmd_example(name, params, budget, with_sim, listing, enum_config, out):
    """Run every check of an example bundle: per module, spec erasure, end to end."""
    if listing or not name:
        _emit([{"name": n, "doc": X.build(n).doc} for n in X.NAMES], out)
        return
    b = _bundle(name, params)
    b.enumcfg = merge_config(b.enumcfg, _config_data(enum_config))
    checks = X.check_all(b, budget)
    report = {"example": b.name, "checks": checks,
              "verdict": "Holds" if all(c["verdict"] == "Holds" for c in checks) else "Violation"}
    if with_sim and b.simcfg:
        report["sim"] = X.sim_bundle(b)
    _emit(report, out)
    sys.exit(0 if report["verdict"] == "Holds" else 1)


if __name__ == "__main__":
    main()
