"""The ten numbered acceptance criteria, each timed against its limit.

Every test prints one ``criterion N PASS/FAIL`` line; the lines are repeated
in the terminal summary.
"""
import itertools
import random

import pytest

from abslogic import pcm as P
from abslogic import examples as X
from abslogic.abspec import safe_module
from abslogic.behavior import EnumStats, check_refine, enumerate_beh, enumerate_prog, included, trace_str
from abslogic.imp import embed, parse, render
from abslogic.kernel import TOP, close, link
from abslogic.simulation import adequacy_probe, random_ctx, random_pair, random_sim_config, tree_module
from abslogic.values import Int, List, Ordinal, Unit, heap
from abslogic.tracekernel import ERROR, PARTIAL, TERM, UB

from gen import fill, guarantee_assume, random_context, random_imp_module, skip_hole

pytestmark = pytest.mark.acceptance


def _events(t):
    return [(fn, a) for fn, a, _r in t[0]]


def _verdicts(checks):
    return {c["check"]: c["verdict"] for c in checks}


def test_criterion_01_guarantee_assume(criterion):
    with criterion(1, "guarantee(P); assume(P) <= skip in 200 contexts at budget 8", 10) as c:
        rng = random.Random(2024)
        held = 0
        for _ in range(200):
            k = random_context(rng)
            lhs = enumerate_prog(lambda: fill(k, guarantee_assume), 8)
            rhs = enumerate_prog(lambda: fill(k, skip_hole), 8)
            v = included(lhs, rhs)
            assert v, f"context {k}: {trace_str(v.witness)}"
            held += 1
        c.note(f"{held}/200 hold")


def test_criterion_02_hoare(criterion):
    with criterion(2, "hoare: impl <= abspecs at budget 60; erased trace [print 441, print 42] Term", 1):
        b = X.hoare()
        r = b.refine({}, b.all_("abspec"), budget=60)
        assert r["verdict"] == "Holds"
        erased = enumerate_beh(close(link(b.stack(b.all_("abs"))), "Main.main", List(()), b.caller), 60)
        done = [t for t in erased.traces if t[1] != PARTIAL]
        assert len(done) == 1
        assert _events(done[0]) == [("print", Int(441)), ("print", Int(42))]
        assert done[0][1] == TERM


def test_criterion_03_cannon(criterion):
    with criterion(3, "cannon: one shot holds everywhere, two shots fail with [print 1, print 1] Error", 5):
        one = X.check_all(X.cannon(1))
        assert [c["kind"] for c in one] == ["module", "module", "erasure", "end-to-end"]
        assert all(c["verdict"] == "Holds" for c in one), _verdicts(one)
        two = X.check_all(X.cannon(2))
        bad = [c for c in two if c["verdict"] == "Violation"]
        assert bad and any(c["kind"] == "end-to-end" for c in bad)
        for c in bad:
            w = next(r["witness"] for r in c["report"]["results"] if r["verdict"] == "Violation")
            assert [e["fn"] for e in w["events"]] == ["print", "print"]
            assert [e["args"] for e in w["events"]] == [{"int": 1}, {"int": 1}]
            assert w["terminal"] == ERROR


def test_criterion_04_mem_stack(criterion):
    with criterion(4, "mem/stack: stack1 at budget 120, stack2a, stack2b and the composed chain", 60) as c:
        from abslogic.speclang import DOMAINS
        assert DOMAINS.blocks == (0, 1, 2, 3) and DOMAINS.ints == (0, 1, 2)
        for name in ("stack1", "stack2a", "stack2b"):
            b = X.build(name)
            assert b.budget == 120
            checks = X.check_all(b)
            assert all(x["verdict"] == "Holds" for x in checks), (name, _verdicts(checks))
            c.note(f"{name} {sum(x['seconds'] for x in checks):.1f}s")
        s1, s2 = X.stack1(), X.stack2a()
        for top in (s2.abspec("Stack"), s2.erased("Stack")):
            r = check_refine(s1.stack(), list(s1.context) + [top], [], "Client.main", [Unit], 120,
                             s1.enumcfg, None, TOP)
            assert r["verdict"] == "Holds"


ECHO_SCRIPTS = [s + (0,) for n in (0, 1, 2) for s in itertools.product((1, 2), repeat=n)]


def test_criterion_05_echo(criterion):
    with criterion(5, "echo: reverse output for 7 scripts, impl <= toAbs, abspec checks on [1, 0]", 30):
        for script in ECHO_SCRIPTS:
            b = X.echo(script)
            want = [("putint", Int(v)) for v in reversed(script[:-1])]
            for side in ({}, b.all_("abs")):
                beh = enumerate_beh(close(link(b.stack(side)), *b.main[:1], b.main[1][0], b.caller),
                                    b.budget, b.enumcfg)
                done = [t for t in beh.traces if t[1] != PARTIAL]
                assert done, (script, side)
                for t in done:
                    assert t[1] == TERM
                    assert [e for e in _events(t) if e[0] == "putint"] == want
            r = b.refine({}, b.all_("abs"))
            assert r["verdict"] == "Holds", script
        checks = X.check_all(X.echo((1, 0)))
        assert all(x["verdict"] == "Holds" for x in checks), _verdicts(checks)


def test_criterion_06_repeat(criterion):
    with criterion(6, "repeat: add(n, m) = n + m, low measure is NB", 5):
        b = X.repeat()
        for n in (0, 1, 2):
            for m in (0, 3):
                for side in ({}, b.all_("abs")):
                    beh = enumerate_beh(close(link(b.stack(side)), "AD.add", List((Int(n), Int(m)))), b.budget)
                    assert [(t[1], t[2]) for t in beh.traces] == [(TERM, Int(n + m))]
        assert all(x["verdict"] == "Holds" for x in X.check_all(b))
        low = X.measure_probe(b, n=2, m=3, d=Ordinal(1, 2))
        assert low.traces == (((), PARTIAL, None),)
        high = X.measure_probe(b, n=2, m=3, d=Ordinal(1, 3))
        assert [(t[1], t[2]) for t in high.traces] == [(TERM, Int(5))]


def test_criterion_07_pcm_laws(criterion):
    with criterion(7, "PCM laws: Cannon, Mem 2x2 cells, points-to cons, fpu", 5):
        assert len(P.CANNON.universe) == 6
        universes = [P.CANNON,
                     P.mem_pcm([(0, 0), (0, 8), (1, 0), (1, 8)], (0,)),
                     P.mem_pcm([(0, 0), (0, 8)], (0, 1))]
        for u in universes:
            bad = P.check_laws(u)
            assert not any(bad.values()), (u.name, {k: v[:3] for k, v in bad.items() if v})
        for blk in (0, 1):
            p = heap(blk, 0)
            for n in range(1, 5):
                for vs in itertools.product((0, 1), repeat=n):
                    whole = P.points_to(p, vs)
                    assert whole == P.add(P.points_to(p, vs[:1]), P.points_to(p.shift(8), vs[1:]))
        assert P.fpu(P.CANNON, P.add(P.READY, P.BALL), P.FIRED)
        assert not P.fpu(P.CANNON, P.READY, P.FIRED)


def test_criterion_08_safe_safe(criterion):
    with criterion(8, "safe . safe at depth 8 has no Error", 10) as c:
        a = safe_module("A", ["B.g"], ["A.f"])
        b = safe_module("B", ["A.f"], ["B.g"])
        stats = EnumStats()
        beh = enumerate_beh(close(link(a, b), "A.f"), 8, stats=stats)
        c.note(f"{stats.nodes} configurations")
        assert len(beh) > 0 and stats.nodes > 100
        assert all(t[1] not in (ERROR, UB) for t in beh.traces)


def test_criterion_09_adequacy(criterion):
    with criterion(9, "sim Holds implies trace Holds: examples and 100 random pairs", 60) as c:
        rows = []
        for b, cfgs in [(X.hoare(), None), (X.cannon(1), None), (X.cannon(2), None),
                        (X.hoare(), X.hoare_false_invariant())]:
            rows += X.adequacy_bundle(b, cfgs)
        for r in rows:
            assert r["status"] != "checker bug", r
            if r["sim"] == "Holds":
                assert r["trace"] == "Holds"
        statuses = {}
        for seed in range(100):
            ti, ta = random_pair(seed)
            r = adequacy_probe(random_sim_config(), tree_module(ti), tree_module(ta), [random_ctx()],
                               "R.f", [Unit], 40)
            assert r["status"] != "checker bug", seed
            statuses[r["status"]] = statuses.get(r["status"], 0) + 1
        c.note(", ".join(f"{k} {v}" for k, v in sorted(statuses.items())))


def test_criterion_10_imp_roundtrip(criterion):
    with criterion(10, "IMP round trip on the corpus and 50 deterministic programs", 5):
        for name in X.CORPUS:
            m = parse(X.source(name))
            assert parse(render(m)) == m, name
        rng = random.Random(10)
        for _ in range(50):
            m = random_imp_module(rng)
            assert parse(render(m)) == m
            beh = enumerate_beh(close(link(embed(m)), "G.main", List(())), 500)
            assert len(beh) == 1 and beh.traces[0][1] != PARTIAL, render(m)
