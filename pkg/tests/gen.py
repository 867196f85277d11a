"""Seeded generators shared by the property and acceptance tests."""
import random

from abslogic.imp.ast import Assign, BinOp, CallFn, FunDef, If, Module, Num, Skip, Syscall, Var
from abslogic.kernel import (BOOLS, Ret, assume, bind, choose, guarantee, nb, obs, skip, take,
                             ub, while_loop)
from abslogic.values import Int


# -- program contexts with a hole ----------------------------------------------

def random_context(rng: random.Random, depth=4):
    """A context tree; ``fill(tree, hole)`` turns it into a Prog."""
    if depth == 0:
        return rng.choice([("hole", rng.choice(["true", "false", "last", "not-last"])), ("ret",)])
    r = rng.random()
    sub = lambda: random_context(rng, depth - 1)  # noqa: E731
    if r < 0.2:
        return ("obs", rng.randint(0, 2), sub())
    if r < 0.4:
        return ("choose", sub(), sub())
    if r < 0.55:
        return ("take", sub(), sub())
    if r < 0.7:
        return ("seq", sub(), sub())
    if r < 0.75:
        return ("loop", sub())
    if r < 0.8:
        return (rng.choice(["ub", "nb"]),)
    return ("hole", rng.choice(["true", "false", "last", "not-last"]))


def fill(t, hole, last=True):
    """The Prog of context ``t`` with ``hole(p)`` at each hole; p is the hole's condition."""
    tag = t[0]
    if tag == "hole":
        p = {"true": True, "false": False, "last": last, "not-last": not last}[t[1]]
        return hole(p)
    if tag == "ret":
        return Ret(Int(0))
    if tag == "ub":
        return ub()
    if tag == "nb":
        return nb()
    if tag == "obs":
        return bind(obs("print", Int(t[1])), lambda _: fill(t[2], hole, last))
    if tag in ("choose", "take"):
        pick = choose if tag == "choose" else take
        return bind(pick(BOOLS), lambda b: fill(t[1] if b else t[2], hole, b))
    if tag == "seq":
        return bind(fill(t[1], hole, last), lambda _: fill(t[2], hole, last))
    if tag == "loop":
        return while_loop(lambda s: choose(BOOLS), lambda s: bind(fill(t[1], hole, last), lambda _: Ret(s)))
    raise ValueError(tag)


def guarantee_assume(p):
    return bind(guarantee(p), lambda _: assume(p))


def skip_hole(p):
    return skip()


# -- deterministic IMP modules --------------------------------------------------

_OPS = ("+", "-", "*", "==", "<", "/", "%")


def _expr(rng, names, depth):
    if depth == 0 or rng.random() < 0.35:
        return Var(rng.choice(names)) if names and rng.random() < 0.6 else Num(rng.randint(0, 9))
    op = rng.choice(_OPS)
    rhs = Num(rng.randint(1, 9)) if op in "/%" else _expr(rng, names, depth - 1)
    return BinOp(op, _expr(rng, names, depth - 1), rhs)


def _stmts(rng, names, helpers, depth, n):
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.4:
            out.append(Assign(rng.choice(names), _expr(rng, names, 2)))
        elif r < 0.6:
            out.append(Syscall(None, "print", (_expr(rng, names, 2),)))
        elif r < 0.75 and depth > 0:
            out.append(If(_expr(rng, names, 2), tuple(_stmts(rng, names, helpers, depth - 1, 2)),
                          tuple(_stmts(rng, names, helpers, depth - 1, rng.randint(0, 2)))))
        elif r < 0.9 and helpers:
            f, arity = rng.choice(helpers)
            out.append(CallFn(rng.choice(names), f, tuple(_expr(rng, names, 1) for _ in range(arity))))
        else:
            out.append(Skip())
    return out


def random_imp_module(rng: random.Random, name="G"):
    """A module without choice or input: helpers first, each calling only earlier ones."""
    funs, helpers = [], []
    for i in range(rng.randint(0, 2)):
        params = tuple(f"p{j}" for j in range(rng.randint(0, 2)))
        vs = ("t",)
        names = list(params + vs)
        body = (Assign("t", Num(rng.randint(0, 9))),) + tuple(_stmts(rng, names, list(helpers), 1, rng.randint(1, 3)))
        funs.append(FunDef(f"h{i}", params, vs, body, _expr(rng, names, 1)))
        helpers.append((f"{name}.h{i}", len(params)))
    vs = ("a", "b", "c")
    locals_ = (("g", rng.randint(0, 5)),) if rng.random() < 0.3 else ()
    names = list(vs) + [g for g, _ in locals_]
    init = tuple(Assign(v, Num(rng.randint(0, 9))) for v in vs)
    body = init + tuple(_stmts(rng, names, helpers, 2, rng.randint(1, 5)))
    funs.append(FunDef("main", (), vs, body, _expr(rng, names, 1)))
    return Module(name, locals_, tuple(funs))
