"""Compare the numba kernels against the numpy fallback on a synthetic trace.

    python benchmarks/bench_kernels.py --lines 200000 --repeat 3
"""

import argparse
import statistics
import time

import numpy as np

from lemma_forge import build_graph, kernels
from lemma_forge.synth import random_trace


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - start)
    return statistics.median(runs), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lines", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    g = build_graph(random_trace(args.lines, seed=args.seed), {i: "T" for i in range(1, args.lines + 1, 100)}, {"A"})
    stop_d = g.named | g.axiom
    outdeg = np.diff(g.dep_ptr)
    cases = {
        "D pass": lambda jit: kernels.sum_pass(g.dep_ptr, g.dep_idx, stop_d, use_jit=jit),
        "U pass": lambda jit: kernels.sum_pass(g.use_ptr, g.use_idx, g.named, descending=True, use_jit=jit),
        "L pass": lambda jit: kernels.chain_pass(g.dep_ptr, g.dep_idx, stop_d, use_jit=jit),
        "PageRank": lambda jit: kernels.pagerank(g.use_ptr, g.use_idx, outdeg, 0.85, 1e-12, 200, use_jit=jit)[0],
    }
    for case in cases.values():  # compile outside the timed region
        case(True)

    print(f"{len(g)} lemmas, {g.dep_idx.size} edges, threads={kernels.set_threads(None)}")
    print(f"{'kernel':<10}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  identical")
    for name, case in cases.items():
        t_jit, a = _time(lambda: case(True), args.repeat)
        t_np, b = _time(lambda: case(False), args.repeat)
        same = np.array_equal(a, b)
        print(f"{name:<10}{t_jit:>10.4f}{t_np:>10.4f}{t_np / t_jit:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
