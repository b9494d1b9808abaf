"""Inputs for the ATP evaluation scenarios.

The central operation is the *nearest-member frontier*: starting from a
lemma, follow dependency edges, stop at members of an anchor set, and keep
walking through everything else. The frontier of a conjecture with respect
to the new theorem set gives its parents in the derived graph; with respect
to the original theorems it gives the replacement for a directly preceding
lemma.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .graph import ProofGraph, prefix_subgraph
from .metrics import MetricParams
from .select import SelectionResult, best_lemmas

CHEATING = "cheating"
ALMOST_HONEST = "almost-honest"
MODES = (CHEATING, ALMOST_HONEST)


class Frontier:
    """Memoized frontier queries for one (graph, anchor set) pair.

    Keep one instance around per anchor set: the cache makes repeated queries
    linear in the graph size overall.
    """

    def __init__(self, graph: ProofGraph, anchors: Iterable[int]):
        self.graph = graph
        self.member = graph.mask(anchors)
        self._ptr = graph.dep_ptr
        self._idx = graph.dep_idx
        self._through: dict[int, frozenset[int]] = {}  # 0-based position -> frontier of its deps

    def _row(self, pos: int) -> list[int]:
        return self._idx[self._ptr[pos]:self._ptr[pos + 1]].tolist()

    def _expand(self, pos: int) -> frozenset[int]:
        """Frontier reached from the deps of ``pos``; iterative post-order DFS."""
        member = self.member
        cache = self._through
        stack = [(pos, False)]
        while stack:
            p, ready = stack.pop()
            if ready:
                acc: set[int] = set()
                for q in self._row(p):
                    if member[q]:
                        acc.add(q)
                    else:
                        acc |= cache[q]
                cache[p] = frozenset(acc)
                continue
            if p in cache:
                continue
            stack.append((p, True))
            for q in self._row(p):
                if not member[q] and q not in cache:
                    stack.append((q, False))
        return cache[pos]

    def of(self, index: int) -> tuple[int, ...]:
        """Nearest anchors strictly below ``index`` (1-based in and out), ascending."""
        if not 1 <= index <= len(self.graph):
            raise IndexError(f"lemma index {index} out of range")
        return tuple(sorted(q + 1 for q in self._expand(index - 1)))


def closest_named_ancestors(graph: ProofGraph, i: int, anchor_set: Iterable[int] | Frontier) -> tuple[int, ...]:
    frontier = anchor_set if isinstance(anchor_set, Frontier) else Frontier(graph, anchor_set)
    return frontier.of(i)


@dataclass(frozen=True)
class DerivedGraph:
    members: frozenset[int]
    parents: Mapping[int, tuple[int, ...]]

    def edges(self) -> Iterator[tuple[int, int]]:
        for t in sorted(self.parents):
            for p in self.parents[t]:
                yield t, p


def derive_new_graph(graph: ProofGraph, new_thms: Iterable[int]) -> DerivedGraph:
    members = frozenset(int(t) for t in new_thms)
    frontier = Frontier(graph, members)
    parents = {t: frontier.of(t) for t in sorted(members)}
    return DerivedGraph(members, parents)


@dataclass(frozen=True)
class Problem:
    conjecture: int
    premises: tuple[int, ...]
    mode: str


def proof_segments(orig: Iterable[int]) -> dict[int, tuple[int, int]]:
    """For each original theorem t, its proof segment as a half-open range (prev, t]."""
    out = {}
    prev = 0
    for t in sorted(orig):
        out[t] = (prev, t)
        prev = t
    return out


def is_directly_preceding(graph: ProofGraph, p: int, t: int, segments: Mapping[int, tuple[int, int]],
                          orig: frozenset[int]) -> bool:
    """True when new lemma ``p`` was first derived inside the original proof of ``t``.

    Original theorems and axioms are never new lemmas.
    """
    if p in orig or graph.is_axiom(p):
        return False
    lo, hi = segments[t]
    return lo < p <= hi


def emit_problems(graph: ProofGraph, dg: DerivedGraph, orig: Iterable[int], mode: str) -> list[Problem]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    orig = frozenset(int(t) for t in orig)
    missing = orig - dg.members
    if missing:
        raise ValueError(f"original theorems missing from the derived graph: {sorted(missing)[:5]}")
    segments = proof_segments(orig)
    to_orig = Frontier(graph, orig) if mode == ALMOST_HONEST else None
    problems = []
    for t in sorted(orig):
        premises = dg.parents[t]
        if to_orig is not None:
            kept: set[int] = set()
            for p in premises:
                if is_directly_preceding(graph, p, t, segments, orig):
                    kept.update(to_orig.of(p))
                else:
                    kept.add(p)
            premises = tuple(sorted(kept))
        problems.append(Problem(t, premises, mode))
    return problems


def format_problems(problems: Iterable[Problem]) -> bytes:
    return "".join(_adjacency_line(p.conjecture, p.premises) for p in problems).encode("ascii")


def _adjacency_line(t: int, items: Iterable[int]) -> str:
    items = list(items)
    return f"{t}: {' '.join(map(str, items))}\n" if items else f"{t}:\n"


def chain_closure(orig: Iterable[int], provable: Mapping[int, Iterable[int]]) -> dict[int, int | None]:
    """Chain level of each conjecture from external ATP results.

    ``provable[t]`` holds the rounds in which an ATP proved ``t``; round ``k``
    allows every lemma of level below ``k`` as a premise. The level is the
    first such round, or None if ``t`` was never proved. Original theorems
    are the round-0 premises and get no level.
    """
    orig = frozenset(orig)
    levels: dict[int, int | None] = {}
    for t in sorted(provable):
        if t in orig:
            continue
        rounds = [int(r) for r in provable[t]]
        if any(r < 0 for r in rounds):
            raise ValueError(f"negative round for lemma {t}")
        levels[t] = min(rounds) if rounds else None
    return levels


def format_chain_levels(levels: Mapping[int, int | None]) -> bytes:
    return "".join(f"{t}\t{'none' if lv is None else lv}\n" for t, lv in sorted(levels.items())).encode("ascii")


def export_chrono_dataset(graph: ProofGraph, dg: DerivedGraph) -> bytes:
    """Members in trace order, each with its derived-graph parents."""
    return "".join(_adjacency_line(t, dg.parents[t]) for t in sorted(dg.members)).encode("ascii")


def honest_theorems(graph: ProofGraph, step: int) -> list[int]:
    if step < 1:
        raise ValueError("step must be >= 1")
    return graph.named_indices()[::step]


def fully_honest_schedule(graph: ProofGraph, metric_id: str, params: MetricParams | None, step: int,
                          M: int) -> Iterator[tuple[int, SelectionResult]]:
    """For every ``step``-th named theorem j, select lemmas using only the proofs before j."""
    for j in honest_theorems(graph, step):
        sub = prefix_subgraph(graph, j)
        yield j, best_lemmas(sub, metric_id, params, sub.named, M)
