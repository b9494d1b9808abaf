"""Alpha-variant merging.

Every dependency reference is redirected to the earliest lemma carrying the
same normal form. Passing raw statement strings as the "normal forms" gives
exact-duplicate merging with the same machinery.
"""

from __future__ import annotations

import numpy as np

from .trace_io import NormalFormMap, ProofTrace


def canonical_map(n: int, nf: NormalFormMap) -> np.ndarray:
    """canon[i] = 0-based position of the first lemma whose normal form equals that of position i."""
    canon = np.arange(n, dtype=np.int64)
    first: dict[str, int] = {}
    for index in sorted(nf):
        if 1 <= index <= n:
            canon[index - 1] = first.setdefault(nf[index], index - 1)
    return canon


def _dedupe_rows(ptr: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop repeated entries within each CSR row, keeping first occurrences in order."""
    n = ptr.shape[0] - 1
    if idx.size == 0:
        return ptr.copy(), idx.copy()
    row = np.repeat(np.arange(n, dtype=np.int64), np.diff(ptr))
    order = np.lexsort((np.arange(idx.size), idx, row))
    r, v = row[order], idx[order]
    dup = np.zeros(idx.size, dtype=bool)
    dup[1:] = (r[1:] == r[:-1]) & (v[1:] == v[:-1])
    keep = np.ones(idx.size, dtype=bool)
    keep[order[dup]] = False
    new_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(row[keep], minlength=n), out=new_ptr[1:])
    return new_ptr, idx[keep]


def merge_alpha_variants(trace: ProofTrace, nf: NormalFormMap) -> ProofTrace:
    """Rewrite references to point at canonical representatives. No lemma is removed."""
    canon = canonical_map(len(trace), nf)
    ptr, idx = _dedupe_rows(trace.dep_ptr, canon[trace.dep_idx - 1] + 1)
    return ProofTrace.from_arrays(trace.kinds, trace.sizes, ptr, idx)


def prune_variants(trace: ProofTrace, nf: NormalFormMap) -> tuple[ProofTrace, np.ndarray]:
    """Merge, then drop the proofs of non-canonical variants.

    After merging nothing references a non-canonical variant, so it goes;
    an ancestor goes too once every one of its users is gone. Lemmas that
    never had users are kept.

    Returns the renumbered trace and ``remap`` with one entry per old lemma
    (position ``i - 1`` for lemma ``i``): its new 1-based index, the new index
    of its representative if it was a dropped variant, or 0 if it was a
    dropped proof step.
    """
    merged = merge_alpha_variants(trace, nf)
    n = len(merged)
    canon = canonical_map(n, nf)
    variant = canon != np.arange(n)
    ptr = merged.dep_ptr.tolist()
    idx = (merged.dep_idx - 1).tolist()
    live = np.bincount(merged.dep_idx - 1, minlength=n).tolist() if n else []
    had_users = [u > 0 for u in live]
    keep = np.ones(n, dtype=bool)
    for i in range(n - 1, -1, -1):
        if variant[i] or (had_users[i] and live[i] == 0):
            keep[i] = False
            for k in range(ptr[i], ptr[i + 1]):
                live[idx[k]] -= 1
    new_index = np.cumsum(keep) * keep
    remap = new_index.copy()
    remap[variant] = new_index[canon[variant]]

    rows = np.flatnonzero(keep)
    lengths = np.diff(merged.dep_ptr)[rows]
    new_ptr = np.zeros(rows.size + 1, dtype=np.int64)
    np.cumsum(lengths, out=new_ptr[1:])
    edge_keep = np.repeat(keep, np.diff(merged.dep_ptr))
    new_idx = new_index[merged.dep_idx[edge_keep] - 1]
    pruned = ProofTrace.from_arrays(merged.kinds[rows], merged.sizes[rows], new_ptr, new_idx)
    return pruned, remap
