"""Synthetic traces for scale tests and benchmarks.

    python -m lemma_forge.synth --lines 1000000 --seed 7 --out big.trace
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .trace_io import ProofTrace, dumps_names, write_trace

KIND_POOL = np.frombuffer(b"RRRRCCCCEEAATFBM", dtype=np.uint8)


def random_trace(n: int, seed: int = 0, max_deps: int = 4, locality: float = 200.0) -> ProofTrace:
    """Random trace shaped like a kernel log: most dependencies are recent lemmas.

    Dependency distance is geometric with mean ``locality``; duplicates on a
    line are dropped, so lines may carry fewer than the drawn count.
    """
    rng = np.random.default_rng(seed)
    kinds = KIND_POOL[rng.integers(0, KIND_POOL.size, n)]
    sizes = rng.integers(1, 60, n)
    counts = rng.integers(0, max_deps + 1, n)
    counts[0] = 0
    owner = np.repeat(np.arange(1, n + 1, dtype=np.int64), counts)
    back = rng.geometric(1.0 / locality, owner.size)
    deps = owner - back
    deps = np.where(deps >= 1, deps, rng.integers(0, np.maximum(owner - 1, 1)) + 1)
    valid = deps < owner
    owner, deps = owner[valid], deps[valid]
    # dedupe (owner, dep) pairs, keeping first occurrences
    key = owner * (n + 1) + deps
    _, first = np.unique(key, return_index=True)
    first.sort()
    owner, deps = owner[first], deps[first]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner - 1, minlength=n), out=ptr[1:])
    return ProofTrace.from_arrays(kinds, sizes, ptr, deps)


def doubling_ladder(n: int) -> ProofTrace:
    """Lemma 1 is an axiom ('A'); lemma i > 1 depends on every earlier lemma.

    With no named lemmas, D(i) = 2 * D(i - 1) = 2**(i - 2) for i >= 2.
    """
    nodes = [("A", 1, ())]
    nodes += [("C", 1, tuple(range(i - 1, 0, -1))) for i in range(2, n + 1)]
    return ProofTrace.from_nodes(nodes)


def random_names(n: int, fraction: float, seed: int = 0) -> dict[int, str]:
    rng = np.random.default_rng(seed)
    picks = np.flatnonzero(rng.random(n) < fraction) + 1
    return {int(i): f"THM_{int(i)}" for i in picks}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m lemma_forge.synth", description=__doc__.splitlines()[0])
    ap.add_argument("--lines", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-deps", type=int, default=4)
    ap.add_argument("--out", default="-")
    ap.add_argument("--names-out", help="also write a names file naming ~1%% of lemmas")
    args = ap.parse_args(argv)
    trace = random_trace(args.lines, args.seed, args.max_deps)
    if args.out == "-":
        write_trace(trace, sys.stdout.buffer)
    else:
        with open(args.out, "wb") as fh:
            write_trace(trace, fh)
    if args.names_out:
        with open(args.names_out, "wb") as fh:
            fh.write(dumps_names(random_names(args.lines, 0.01, args.seed)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
