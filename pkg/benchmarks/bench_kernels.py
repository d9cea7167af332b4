"""Compare the compiled kernels with the pure-Python fallback on the same workloads.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

from causalverif._backend import available
from causalverif.cause import _Engine, _cause_formula
from causalverif.cli import data_path
from causalverif.explain import explain_exact
from causalverif.generate import random_binary_model, random_failing_pair
from causalverif.ltl.trace import check_trace
from causalverif.model import load_model
from causalverif.ste import benchmark


def voting(kernels):
    m = load_model(data_path("vote11.json"))
    eng = _Engine(m, "eleven_zero", _cause_formula(m, "WIN=G"), kernels)
    for i in range(1, 12):
        eng.report(((f"V{i}", "G"),))


def solves(kernels):
    m = load_model(data_path("vote11.json"))
    c = _Engine(m, "eleven_zero", _cause_formula(m, "WIN=G"), kernels).c
    rng = random.Random(0)
    voters = [c.index[f"V{i}"] for i in range(1, 12)]
    for _ in range(20000):
        c.phi_under({v: rng.randint(0, 1) for v in rng.sample(voters, 4)})


def large_solves(kernels):
    m = random_binary_model(random.Random(11), 400, max_parents=4)
    c = _Engine(m, "c", _cause_formula(m, "V399=0 | V399=1"), kernels).c
    rng = random.Random(0)
    for _ in range(3000):
        c.solve({c.endo[rng.randrange(len(c.endo))]: rng.randint(0, 1)})


def traces(kernels):
    rng = random.Random(3)
    pairs = [random_failing_pair(rng, 3, 6) for _ in range(300)]
    for t, f in pairs:
        check_trace(t, f, kernels)


def explain(kernels):
    rng = random.Random(5)
    for _ in range(15):
        t, f = random_failing_pair(rng, 3, 6)
        explain_exact(t, f, kernels=kernels)


def ste(kernels):
    benchmark(1, 20, kernels=kernels)


WORKLOADS = [("20000 solves, 12 variables", solves), ("3000 solves, 400 variables", large_solves),
             ("voting 11-0, every voter", voting), ("300 trace checks", traces),
             ("15 exact explanations", explain), ("STE benchmark, 20 circuits", ste)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available()
    print(f"{'workload':<28}" + "".join(f"{b:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for label, fn in WORKLOADS:
        times = {}
        for name, k in backends.items():
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                fn(k)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        row = f"{label:<28}" + "".join(f"{times[b]:>11.4f}s" for b in backends)
        if "cython" in times:
            row += f"   {times['python'] / times['cython']:>6.2f}x"
        print(row)


if __name__ == "__main__":
    main()
