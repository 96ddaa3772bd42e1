"""Compare the compiled and pure-Python relevance kernels.

Builds one explored tree per task, then times table construction (preorder
and virtual-tree build) and state evaluation for every available backend.

    python benchmarks/bench_kernels.py [--nodes 50000] [--states 200]
"""
import argparse
import random
import time

import numpy as np

from relscore import kernels, toys
from relscore.explorer import ExploreConfig, explore
from relscore.pddl import ground, heuristic_task, parse_domain, parse_problem
from relscore.relevance import RelevanceTable

TASKS = {
    "logistics-3-2-4": ("logistics", toys.logistics_problem(3, 2, 4, 2, 2)),
    "blocksworld-7": ("blocksworld", toys.blocksworld_problem(7, 3)),
    "ferry-4-4": ("ferry", toys.ferry_problem(4, 4, 1)),
}


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--states", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available()
    print(f"backends: {', '.join(backends)}")
    print(f"{'task':<18} {'nodes':>7} {'backend':<8} {'build ms':>9} {'eval us/state':>14} {'speedup':>8}")
    for name, (dom, prob) in TASKS.items():
        task = heuristic_task(ground(parse_domain(toys.DOMAINS[dom]), parse_problem(prob)))
        tree = explore(task, ExploreConfig(rho=0.01, min_nodes=args.nodes, max_nodes=args.nodes, seed=0))
        rng = random.Random(1)
        states = [rng.getrandbits(len(task.facts)) for _ in range(args.states)]
        ref = None
        base = None
        for b in backends:
            build = _best(lambda: RelevanceTable(tree, backend=b), args.repeat)
            table = RelevanceTable(tree, backend=b)
            ev = _best(lambda: [table.scores(s) for s in states], args.repeat) / len(states)
            got = np.array([table.scores(s) for s in states[:10]])
            if ref is None:
                ref = got
            assert np.array_equal(ref, got), "backends disagree"
            base = base or ev
            print(f"{name:<18} {len(tree):>7} {b:<8} {build * 1e3:>9.1f} {ev * 1e6:>14.1f} {base / ev:>7.1f}x")


if __name__ == "__main__":
    main()
