"""Compiled vs pure-Python round kernel on the same markets.

    python benchmarks/bench_dynamics.py [--rounds T] [--repeat R]

Both kernels must produce identical traces; the script checks that before
reporting timings.
"""
import argparse
import time
from fractions import Fraction

import numpy as np

from bpb_market import Instance, Uniform
from bpb_market.generate import GeneratorSpec, generate_instance
from bpb_market.learning import _backend, run_dynamics

MARKETS = [
    ("free n=2 delta=1/20", Instance([1, 2], ["0.15", "0.2"], 1), Fraction(1, 20)),
    ("uniform(3,2) delta=1/20", Instance([2, 1, 1], ["0.2", "0.15", "0.85"], 1, Uniform(3, 2)),
     Fraction(1, 20)),
    ("graphic n=6 delta=1/20",
     generate_instance(GeneratorSpec(n=6, lam=Fraction(1, 4), m=Fraction(1, 10), family="graphic"), 3),
     Fraction(1, 20)),
]


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    try:
        _backend.get("cython")
    except ImportError:
        print("compiled kernel not built; only the Python kernel is available")
        return
    print(f"{'market':28s} {'rounds':>7s} {'python s':>9s} {'cython s':>9s} {'speedup':>8s}")
    for name, inst, delta in MARKETS:
        runs = {}
        for b in ("python", "cython"):
            runs[b] = best_of(lambda: run_dynamics(inst, delta, a.rounds, seed=0, backend=b), a.repeat)
        tp, trp = runs["python"]
        tc, trc = runs["cython"]
        same = (np.array_equal(trp.bids, trc.bids) and np.array_equal(trp.rewards, trc.rewards)
                and np.array_equal(trp.sigma, trc.sigma))
        if not same:
            raise SystemExit(f"{name}: kernels disagree")
        print(f"{name:28s} {a.rounds:7d} {tp:9.3f} {tc:9.4f} {tp / tc:7.0f}x")


if __name__ == "__main__":
    main()
