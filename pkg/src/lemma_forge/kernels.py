"""Hot inner loops over CSR adjacency arrays.

Every kernel exists twice: a numba ``@njit`` version and a plain
numpy/Python version. ``LEMMA_FORGE_DISABLE_JIT=1`` (or numba being absent)
selects the plain path at import time. Both paths perform the same floating
point operations in the same order, so their outputs are bit-identical.

CSR convention: row ``i`` owns ``idx[ptr[i]:ptr[i + 1]]``; all positions are
0-based.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old; skip straight to the portable layers
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        return decorator

    prange = range


def _jit_disabled() -> bool:
    return os.environ.get("LEMMA_FORGE_DISABLE_JIT", "").strip().lower() in {"1", "true", "yes", "on"}


USE_JIT = HAVE_NUMBA and not _jit_disabled()
BACKEND = "numba" if USE_JIT else "numpy"


def set_threads(n: int | None) -> int:
    """Cap kernel parallelism; returns the thread count actually in effect."""
    if not HAVE_NUMBA:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    if n is None:
        n = limit
    n = max(1, min(int(n), limit))
    numba.set_num_threads(n)
    return n


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sum_pass_jit(ptr, idx, stop, descending):
    n = ptr.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    for t in range(n):
        i = n - 1 - t if descending else t
        if stop[i]:
            out[i] = 1.0
            continue
        s = 0.0
        for k in range(ptr[i], ptr[i + 1]):
            s += out[idx[k]]
        out[i] = s
    return out


@njit(cache=True)
def _chain_pass_jit(ptr, idx, stop):
    n = ptr.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    for i in range(n):
        if stop[i]:
            out[i] = 1.0
            continue
        best = 0.0
        for k in range(ptr[i], ptr[i + 1]):
            v = 1.0 + out[idx[k]]
            if v > best:
                best = v
        out[i] = best
    return out


@njit(parallel=True, cache=True)
def _pull_step_jit(pr, in_ptr, in_idx, inv_out, base, f, out):
    n = pr.shape[0]
    for i in prange(n):
        s = 0.0
        for k in range(in_ptr[i], in_ptr[i + 1]):
            j = in_idx[k]
            s += pr[j] * inv_out[j]
        out[i] = f * s + base


@njit(cache=True)
def _pagerank_jit(in_ptr, in_idx, outdeg, f, tol, max_iters):
    n = outdeg.shape[0]
    inv_out = np.zeros(n, dtype=np.float64)
    for j in range(n):
        if outdeg[j] > 0:
            inv_out[j] = 1.0 / outdeg[j]
    pr = np.full(n, 1.0 / n)
    nxt = np.empty(n, dtype=np.float64)
    iters = 0
    while iters < max_iters:
        dangling = 0.0
        for j in range(n):
            if outdeg[j] == 0:
                dangling += pr[j]
        base = (1.0 - f) / n + f * dangling / n
        _pull_step_jit(pr, in_ptr, in_idx, inv_out, base, f, nxt)
        diff = 0.0
        for i in range(n):
            diff += abs(nxt[i] - pr[i])
        pr, nxt = nxt, pr
        iters += 1
        if diff < tol:
            break
    return pr, iters


# ---------------------------------------------------------------------------
# plain fallbacks
# ---------------------------------------------------------------------------


def _sum_pass_py(ptr, idx, stop, descending, one=1.0, zero=0.0):
    n = len(ptr) - 1
    ptr_l = ptr.tolist()
    idx_l = idx.tolist()
    stop_l = stop.tolist()
    out = [zero] * n
    order = range(n - 1, -1, -1) if descending else range(n)
    for i in order:
        if stop_l[i]:
            out[i] = one
            continue
        s = zero
        for k in range(ptr_l[i], ptr_l[i + 1]):
            s += out[idx_l[k]]
        out[i] = s
    return out


def _chain_pass_py(ptr, idx, stop):
    n = len(ptr) - 1
    ptr_l = ptr.tolist()
    idx_l = idx.tolist()
    stop_l = stop.tolist()
    out = [0.0] * n
    for i in range(n):
        if stop_l[i]:
            out[i] = 1.0
            continue
        best = 0.0
        for k in range(ptr_l[i], ptr_l[i + 1]):
            v = 1.0 + out[idx_l[k]]
            if v > best:
                best = v
        out[i] = best
    return np.asarray(out, dtype=np.float64)


def _seq_sum(a: np.ndarray) -> float:
    return float(np.cumsum(a)[-1]) if a.size else 0.0


def _pagerank_np(in_ptr, in_idx, outdeg, f, tol, max_iters):
    n = outdeg.shape[0]
    dst = np.repeat(np.arange(n, dtype=np.int64), np.diff(in_ptr))
    inv_out = np.zeros(n, dtype=np.float64)
    has_out = outdeg > 0
    inv_out[has_out] = 1.0 / outdeg[has_out]
    dangling_mask = ~has_out
    pr = np.full(n, 1.0 / n)
    iters = 0
    while iters < max_iters:
        # cumsum adds strictly left to right, matching the jit loops
        dangling = _seq_sum(pr[dangling_mask])
        base = (1.0 - f) / n + f * dangling / n
        contrib = pr[in_idx] * inv_out[in_idx]
        s = np.bincount(dst, weights=contrib, minlength=n)
        nxt = f * s + base
        diff = _seq_sum(np.abs(nxt - pr))
        pr = nxt
        iters += 1
        if diff < tol:
            break
    return pr, iters


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def sum_pass(ptr: np.ndarray, idx: np.ndarray, stop: np.ndarray, descending: bool = False,
             use_jit: bool | None = None) -> np.ndarray:
    """out[i] = 1 if stop[i] else sum(out[j] for j in row i).

    Rows must only reference already-finished rows for the chosen direction
    (lower positions when ascending, higher when descending).
    """
    if use_jit is None:
        use_jit = USE_JIT
    if use_jit:
        return _sum_pass_jit(ptr, idx, stop, descending)
    return np.asarray(_sum_pass_py(ptr, idx, stop, descending), dtype=np.float64)


def sum_pass_exact(ptr: np.ndarray, idx: np.ndarray, stop: np.ndarray, descending: bool = False) -> list[int]:
    """Arbitrary-precision integer variant of :func:`sum_pass`."""
    return _sum_pass_py(ptr, idx, stop, descending, one=1, zero=0)


def chain_pass(ptr: np.ndarray, idx: np.ndarray, stop: np.ndarray, use_jit: bool | None = None) -> np.ndarray:
    if use_jit is None:
        use_jit = USE_JIT
    if use_jit:
        return _chain_pass_jit(ptr, idx, stop)
    return _chain_pass_py(ptr, idx, stop)


def pagerank(in_ptr: np.ndarray, in_idx: np.ndarray, outdeg: np.ndarray, f: float, tol: float,
             max_iters: int, use_jit: bool | None = None) -> tuple[np.ndarray, int]:
    """Power iteration pulling rank along ``in`` rows.

    ``in`` row ``i`` lists the nodes that pass rank to ``i``; ``outdeg[j]`` is
    how many targets ``j`` splits its rank over. Nodes with ``outdeg == 0``
    spread their mass uniformly over all nodes.
    """
    if use_jit is None:
        use_jit = USE_JIT
    outdeg = np.ascontiguousarray(outdeg, dtype=np.int64)
    if use_jit:
        pr, iters = _pagerank_jit(in_ptr, in_idx, outdeg, float(f), float(tol), int(max_iters))
    else:
        pr, iters = _pagerank_np(in_ptr, in_idx, outdeg, float(f), float(tol), int(max_iters))
    return pr, int(iters)
