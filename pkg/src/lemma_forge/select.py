"""Greedy best-lemma selection.

Each round scores every lemma against the current Named set, names the
best unnamed non-axiom lemma (lowest index on ties) and repeats. Scores are
recomputed from scratch every round.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import metrics
from .graph import ProofGraph
from .metrics import MetricParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionResult:
    chosen: tuple[tuple[int, float], ...]
    named_final: frozenset[int]

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.chosen]


def _initial_mask(graph: ProofGraph, named0) -> np.ndarray:
    if isinstance(named0, np.ndarray) and named0.dtype == bool:
        return named0.copy()
    return graph.mask(named0)


def select_schedule(graph: ProofGraph, metric_id: str, params: MetricParams | None,
                    named0: Iterable[int] | np.ndarray, M: int,
                    emit_every: int = 1) -> Iterator[SelectionResult]:
    """Run the greedy loop, yielding a snapshot every ``emit_every`` selections.

    The last snapshot always reflects the finished run, so ``M=0`` yields one
    empty snapshot.
    """
    if emit_every < 1:
        raise ValueError("emit_every must be >= 1")
    if M < 0:
        raise ValueError("M must be >= 0")
    params = params or MetricParams()
    metric_id = metric_id.upper()
    if metric_id not in metrics.QUALITY_METRICS + metrics.PAGERANK_METRICS:
        raise metrics.MetricError(f"unknown metric {metric_id!r}")

    named = _initial_mask(graph, named0)
    named0_set = frozenset((np.flatnonzero(named) + 1).tolist())
    eligible = ~named & ~graph.axiom
    target = M
    if int(eligible.sum()) < M:
        target = int(eligible.sum())
        log.warning("only %d eligible lemmas; selecting all of them instead of %d", target, M)

    chosen: list[tuple[int, float]] = []

    def snapshot() -> SelectionResult:
        return SelectionResult(tuple(chosen), named0_set | {i for i, _ in chosen})

    if metric_id in metrics.PAGERANK_METRICS:
        # Named-independent: a single sort replaces the greedy rounds
        values = metrics.pr_quality(graph, params, metric_id).values
        order = np.argsort(-values, kind="stable")
        picks = order[eligible[order]][:target]
        for k, pos in enumerate(picks.tolist(), 1):
            chosen.append((pos + 1, float(values[pos])))
            if k % emit_every == 0 and k < target:
                yield snapshot()
        yield snapshot()
        return

    for k in range(1, target + 1):
        values = metrics.score(graph, metric_id, params, named=named).values
        masked = np.where(eligible, values, -np.inf)
        pos = int(np.argmax(masked))
        chosen.append((pos + 1, float(values[pos])))
        named[pos] = True
        eligible[pos] = False
        if k % emit_every == 0 and k < target:
            yield snapshot()
    yield snapshot()


def best_lemmas(graph: ProofGraph, metric_id: str, params: MetricParams | None,
                named0: Iterable[int] | np.ndarray, M: int) -> SelectionResult:
    result = None
    for result in select_schedule(graph, metric_id, params, named0, M, emit_every=max(M, 1)):
        pass
    return result
