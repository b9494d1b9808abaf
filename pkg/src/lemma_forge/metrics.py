"""Lemma quality scores.

Base quantities per lemma ``i``:

* ``D(i)`` recursive dependency count (stops at named lemmas and axioms),
* ``U(i)`` recursive use count (stops at named lemmas),
* ``L(i)`` longest inference chain (stops at named lemmas and axioms),
* ``S(i)`` symbol size, read from the trace.

D and U are carried as doubles and saturate to ``+inf`` instead of wrapping.
An exact big-integer mode exists for checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import ProofGraph

LN_1_1 = math.log(1.1)

QUALITY_METRICS = ("Q1", "Q1R", "Q2", "Q3", "EQ1", "EQ2")
PAGERANK_METRICS = ("PR1", "PR2", "PR3", "PR4", "PR5")


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricParams:
    r: float = 1.0
    f: float = 0.85
    pr_tolerance: float = 1e-12
    pr_max_iters: int = 200

    def __post_init__(self):
        if not 0.0 < self.f < 1.0:
            raise MetricError(f"damping factor must be in (0, 1), got {self.f}")
        if not self.pr_tolerance > 0:
            raise MetricError("pr_tolerance must be positive")
        if not 0.0 <= self.r <= 2.0:
            raise MetricError(f"Q1^r exponent must be in [0, 2], got {self.r}")
        if self.pr_max_iters < 1:
            raise MetricError("pr_max_iters must be at least 1")


@dataclass(frozen=True, eq=False)
class ScoreVector:
    metric_id: str
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, index: int) -> float:
        """Score of 1-based lemma ``index``."""
        if not 1 <= index <= len(self):
            raise IndexError(index)
        return float(self.values[index - 1])

    def tolist(self) -> list[float]:
        return self.values.tolist()


def parse_metric(text: str) -> tuple[str, float | None]:
    """``"q1r:0.5"`` -> ``("Q1R", 0.5)``; ``"pr2"`` -> ``("PR2", None)``."""
    name, _, arg = text.strip().partition(":")
    name = name.upper()
    if name not in QUALITY_METRICS + PAGERANK_METRICS:
        raise MetricError(f"unknown metric {text!r}")
    if name == "Q1R":
        if not arg:
            raise MetricError("q1r needs an exponent, e.g. q1r:0.5")
        try:
            return name, float(arg)
        except ValueError:
            raise MetricError(f"bad exponent in {text!r}") from None
    if arg:
        raise MetricError(f"metric {name.lower()} takes no argument")
    return name, None


def _vector(metric_id: str, values) -> ScoreVector:
    values = np.asarray(values, dtype=np.float64)
    values.setflags(write=False)
    return ScoreVector(metric_id, values)


def _named(graph: ProofGraph, named: np.ndarray | None) -> np.ndarray:
    return graph.named if named is None else named


def compute_D(graph: ProofGraph, named: np.ndarray | None = None, exact: bool = False):
    """Recursive dependencies, one ascending pass.

    With ``exact=True`` returns a list of Python ints instead of a ScoreVector.
    """
    stop = _named(graph, named) | graph.axiom
    if exact:
        return kernels.sum_pass_exact(graph.dep_ptr, graph.dep_idx, stop)
    return _vector("D", kernels.sum_pass(graph.dep_ptr, graph.dep_idx, stop))


def compute_U(graph: ProofGraph, named: np.ndarray | None = None, exact: bool = False):
    """Recursive uses, one descending pass over the reverse adjacency."""
    stop = np.ascontiguousarray(_named(graph, named))
    if exact:
        return kernels.sum_pass_exact(graph.use_ptr, graph.use_idx, stop, descending=True)
    return _vector("U", kernels.sum_pass(graph.use_ptr, graph.use_idx, stop, descending=True))


def compute_L(graph: ProofGraph, named: np.ndarray | None = None) -> ScoreVector:
    """Longest inference chain; unnamed non-axiom lemmas without deps get 0."""
    stop = _named(graph, named) | graph.axiom
    return _vector("L", kernels.chain_pass(graph.dep_ptr, graph.dep_idx, stop))


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # 0 * inf is taken as 0: a zero count means the lemma contributes nothing
    with np.errstate(invalid="ignore", over="ignore"):
        p = a * b
    return np.where((a == 0) | (b == 0), 0.0, p)


def quality(graph: ProofGraph, D, U, L, params: MetricParams, metric_id: str) -> ScoreVector:
    """Q1, Q1R, Q2, Q3, EQ1 or EQ2 from precomputed base vectors.

    ``L`` may be None unless ``metric_id`` is EQ2; ``U`` may be None for
    EQ1/EQ2.
    """
    metric_id = metric_id.upper()
    S = graph.sizes.astype(np.float64)
    d = None if D is None else np.asarray(getattr(D, "values", D), dtype=np.float64)
    u = None if U is None else np.asarray(getattr(U, "values", U), dtype=np.float64)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if metric_id == "Q1":
            values = _product(u, d) / S
        elif metric_id == "Q1R":
            r = float(params.r)
            values = _product(u ** r, d ** (2.0 - r)) / S
        elif metric_id == "Q2":
            values = _product(u, d) / (S * S)
        elif metric_id == "Q3":
            prod = _product(u, d)
            # 1.1**S overflows for large S, so divide in log space
            logprod = np.where(np.isfinite(prod), np.log(prod), np.log(u) + np.log(d))
            values = np.exp(logprod - S * LN_1_1)
            values[prod == 0] = 0.0
        elif metric_id == "EQ1":
            values = d / S
        elif metric_id == "EQ2":
            if L is None:
                raise MetricError("EQ2 needs the longest-chain vector L")
            values = np.asarray(getattr(L, "values", L), dtype=np.float64) / S
        else:
            raise MetricError(f"unknown quality metric {metric_id!r}")
    return _vector(metric_id, values)


def needs(metric_id: str) -> set[str]:
    """Base vectors a quality metric reads."""
    metric_id = metric_id.upper()
    if metric_id in ("Q1", "Q1R", "Q2", "Q3"):
        return {"D", "U"}
    if metric_id == "EQ1":
        return {"D"}
    if metric_id == "EQ2":
        return {"L"}
    raise MetricError(f"unknown quality metric {metric_id!r}")


def score(graph: ProofGraph, metric_id: str, params: MetricParams | None = None,
          named: np.ndarray | None = None) -> ScoreVector:
    """Compute any metric end to end against ``named`` (default: the graph's Named set)."""
    params = params or MetricParams()
    metric_id = metric_id.upper()
    if metric_id in PAGERANK_METRICS:
        return pr_quality(graph, params, metric_id)
    want = needs(metric_id)
    D = compute_D(graph, named) if "D" in want else None
    U = compute_U(graph, named) if "U" in want else None
    L = compute_L(graph, named) if "L" in want else None
    return quality(graph, D, U, L, params, metric_id)


def pagerank(graph: ProofGraph, params: MetricParams, direction: str = "forward") -> ScoreVector:
    """Power-iteration PageRank over the inference DAG.

    ``forward`` (PR1): a lemma is important when important lemmas use it, so
    rank flows from each lemma to its dependencies. ``reverse`` (PR3): rank
    flows from each lemma to its users.
    """
    n = len(graph)
    if n == 0:
        raise MetricError("PageRank of an empty graph is undefined")
    if direction == "forward":
        in_ptr, in_idx, outdeg = graph.use_ptr, graph.use_idx, np.diff(graph.dep_ptr)
        metric_id = "PR1"
    elif direction == "reverse":
        in_ptr, in_idx, outdeg = graph.dep_ptr, _sorted_rows(graph.dep_ptr, graph.dep_idx), np.diff(graph.use_ptr)
        metric_id = "PR3"
    else:
        raise MetricError(f"direction must be 'forward' or 'reverse', got {direction!r}")
    pr, _ = kernels.pagerank(in_ptr, in_idx, outdeg, params.f, params.pr_tolerance, params.pr_max_iters)
    return _vector(metric_id, pr)


def _sorted_rows(ptr: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # ascending within each row gives one summation order for every backend
    n = ptr.shape[0] - 1
    row = np.repeat(np.arange(n, dtype=np.int64), np.diff(ptr))
    return idx[np.lexsort((idx, row))]


def pr_quality(graph: ProofGraph, params: MetricParams, metric_id: str) -> ScoreVector:
    metric_id = metric_id.upper()
    S = graph.sizes.astype(np.float64)
    if metric_id in ("PR1", "PR2"):
        pr1 = pagerank(graph, params, "forward").values
        return _vector(metric_id, pr1 if metric_id == "PR1" else pr1 / S)
    if metric_id in ("PR3", "PR4"):
        pr3 = pagerank(graph, params, "reverse").values
        return _vector(metric_id, pr3 if metric_id == "PR3" else pr3 / S)
    if metric_id == "PR5":
        pr1 = pagerank(graph, params, "forward").values
        pr3 = pagerank(graph, params, "reverse").values
        return _vector(metric_id, (pr1 + pr3) / S)
    raise MetricError(f"unknown PageRank metric {metric_id!r}")
