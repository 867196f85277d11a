"""Time the compiled trace kernel against the pure-Python one.

    python3 benchmarks/bench_tracekernel.py [--sets 200] [--repeat 5]

Both backends get the same random trace sets; results are compared before
any timing is reported.
"""
import argparse
import random
import timeit

from abslogic import _tracekernel_py as pure
from abslogic.values import Int

try:
    from abslogic import _tracekernel as fast
except ImportError:
    fast = None

KINDS = (pure.TERM, pure.ERROR, pure.PARTIAL, pure.UB)


def random_traces(rng, n, depth=6):
    evs = [("print", Int(i), Int(0)) for i in range(3)]
    out = []
    for _ in range(n):
        e = tuple(rng.choice(evs) for _ in range(rng.randint(0, depth)))
        k = rng.choice(KINDS)
        out.append((e, k, Int(rng.randint(0, 2)) if k == pure.TERM else None))
    return out


def workload(mod, sets):
    for a, b in sets:
        na, nb = mod.normalize(a), mod.normalize(b)
        mod.intersect(na, nb)
        mod.union(na, nb)
        mod.included(na, nb)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sets", type=int, default=200)
    ap.add_argument("--size", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    rng = random.Random(a.seed)
    sets = [(random_traces(rng, a.size), random_traces(rng, a.size)) for _ in range(a.sets)]
    backends = [("python", pure)] + ([("cython", fast)] if fast else [])
    if fast:
        for x, y in sets:
            nx, ny = pure.normalize(x), pure.normalize(y)
            assert fast.normalize(x) == nx
            assert fast.intersect(nx, ny) == pure.intersect(nx, ny)
            assert fast.included(nx, ny) == pure.included(nx, ny)
    else:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace`")
    times = {}
    for name, mod in backends:
        times[name] = min(timeit.repeat(lambda: workload(mod, sets), number=1, repeat=a.repeat))
        print(f"{name:7s} {times[name] * 1000:8.1f} ms  ({a.sets} pairs of {a.size} traces)")
    if fast:
        print(f"speedup {times['python'] / times['cython']:.2f}x")


if __name__ == "__main__":
    main()
