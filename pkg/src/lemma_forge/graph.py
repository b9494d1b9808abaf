"""Immutable inference DAG built from a parsed trace."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .trace_io import NamedMap, NormalFormMap, ProofTrace


class GraphError(ValueError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def reverse_csr(dep_ptr: np.ndarray, dep_idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Transpose a 0-based CSR. Rows of the result are in ascending order."""
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(dep_ptr))
    order = np.argsort(dep_idx, kind="stable")
    counts = np.bincount(dep_idx, minlength=n) if n else np.zeros(0, np.int64)
    use_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=use_ptr[1:])
    return use_ptr, src[order]


@dataclass(frozen=True, eq=False)
class ProofGraph:
    """Forward (``d``) and reverse (``u``) adjacency plus named/axiom flags.

    Adjacency arrays are 0-based CSR; the public accessors take and return
    1-based lemma indices. Arrays are read-only, so a graph can be shared
    freely between threads.
    """

    kinds: np.ndarray
    sizes: np.ndarray
    dep_ptr: np.ndarray
    dep_idx: np.ndarray
    use_ptr: np.ndarray
    use_idx: np.ndarray
    named: np.ndarray
    axiom: np.ndarray
    axiom_tags: frozenset[str]
    names: NamedMap

    def __len__(self) -> int:
        return self.sizes.shape[0]

    @property
    def num_edges(self) -> int:
        return int(self.dep_idx.shape[0])

    def deps(self, index: int) -> tuple[int, ...]:
        i = index - 1
        return tuple(int(j) + 1 for j in self.dep_idx[self.dep_ptr[i]:self.dep_ptr[i + 1]])

    def uses(self, index: int) -> tuple[int, ...]:
        i = index - 1
        return tuple(int(j) + 1 for j in self.use_idx[self.use_ptr[i]:self.use_ptr[i + 1]])

    def size(self, index: int) -> int:
        return int(self.sizes[index - 1])

    def is_named(self, index: int) -> bool:
        return bool(self.named[index - 1])

    def is_axiom(self, index: int) -> bool:
        return bool(self.axiom[index - 1])

    def named_indices(self) -> list[int]:
        return (np.flatnonzero(self.named) + 1).tolist()

    def axiom_indices(self) -> list[int]:
        return (np.flatnonzero(self.axiom) + 1).tolist()

    def mask(self, indices: Iterable[int]) -> np.ndarray:
        """Boolean membership array for a set of 1-based indices."""
        m = np.zeros(len(self), dtype=bool)
        idx = np.fromiter((int(i) - 1 for i in indices), dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= len(self):
                raise GraphError(f"lemma index out of range 1..{len(self)}")
            m[idx] = True
        return m

    def with_named(self, named: np.ndarray | Iterable[int]) -> "ProofGraph":
        """Same graph with a different Named set (mask or index collection)."""
        if not isinstance(named, np.ndarray) or named.dtype != bool:
            named = self.mask(named)
        return dataclasses.replace(self, named=_readonly(named.copy()))

    def to_trace(self) -> ProofTrace:
        return ProofTrace(self.kinds, self.sizes, self.dep_ptr, _readonly(self.dep_idx + 1))


def build_graph(trace: ProofTrace, names: NamedMap | None = None,
                axiom_tags: Iterable[str] = ()) -> ProofGraph:
    names = dict(names or {})
    n = len(trace)
    for index in names:
        if not 1 <= index <= n:
            raise GraphError(f"named index {index} out of range 1..{n}")
    tags = frozenset(axiom_tags)
    dep_idx = _readonly(trace.dep_idx - 1)
    use_ptr, use_idx = reverse_csr(trace.dep_ptr, dep_idx, n)
    named = np.zeros(n, dtype=bool)
    if names:
        named[np.fromiter(names, dtype=np.int64) - 1] = True
    axiom = np.isin(trace.kinds, np.frombuffer("".join(sorted(tags)).encode("ascii"), dtype=np.uint8))
    return ProofGraph(
        kinds=trace.kinds,
        sizes=trace.sizes,
        dep_ptr=trace.dep_ptr,
        dep_idx=dep_idx,
        use_ptr=_readonly(use_ptr),
        use_idx=_readonly(use_idx),
        named=_readonly(named),
        axiom=_readonly(axiom),
        axiom_tags=tags,
        names=names,
    )


def prefix_subgraph(graph: ProofGraph, j: int) -> ProofGraph:
    """Induced subgraph on lemmas ``1..j-1``, keeping only names below ``j``."""
    n = len(graph)
    if not 1 <= j <= n:
        raise GraphError(f"prefix bound {j} out of range 1..{n}")
    m = j - 1
    dep_ptr = graph.dep_ptr[: m + 1]
    dep_idx = graph.dep_idx[: int(dep_ptr[-1])]
    use_ptr, use_idx = reverse_csr(dep_ptr, dep_idx, m)
    return ProofGraph(
        kinds=graph.kinds[:m],
        sizes=graph.sizes[:m],
        dep_ptr=dep_ptr,
        dep_idx=dep_idx,
        use_ptr=_readonly(use_ptr),
        use_idx=_readonly(use_idx),
        named=graph.named[:m],
        axiom=graph.axiom[:m],
        axiom_tags=graph.axiom_tags,
        names={i: s for i, s in graph.names.items() if i < j},
    )


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int
    named: int
    axioms: int
    normal_form_classes: int
    zero_dep_non_axioms: int

    def to_tsv(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in dataclasses.asdict(self).items())


def stats(graph: ProofGraph, normal_forms: NormalFormMap | None = None) -> GraphStats:
    """Corpus counts.

    ``normal_form_classes`` counts lemmas up to variable renaming: lemmas
    sharing a normal form count once, lemmas without one count alone.
    """
    n = len(graph)
    normal_forms = normal_forms or {}
    covered = [s for i, s in normal_forms.items() if 1 <= i <= n]
    classes = len(set(covered)) + (n - len(covered))
    no_deps = np.diff(graph.dep_ptr) == 0
    return GraphStats(
        nodes=n,
        edges=graph.num_edges,
        named=int(graph.named.sum()),
        axioms=int(graph.axiom.sum()),
        normal_form_classes=classes,
        zero_dep_non_axioms=int((no_deps & ~graph.axiom).sum()),
    )
