"""Reading and writing proof traces and their side files.

A trace line looks like ``C17 4 1``: a one-letter inference tag glued to the
symbol size, then the indices of the lemmas the inference used. Lines are
numbered from 1 in file order; blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import logging
from array import array
from dataclasses import dataclass
from typing import BinaryIO, Callable, Iterable, Iterator

import numpy as np

log = logging.getLogger(__name__)

NamedMap = dict[int, str]
NormalFormMap = dict[int, str]

PROGRESS_EVERY = 1_000_000


class TraceError(ValueError):
    """Malformed input; ``lineno`` is the physical line number (1-based)."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class TraceSyntaxError(TraceError):
    pass


class ForwardReferenceError(TraceError):
    """A dependency points at the current line or a later one."""


class DependencyRangeError(TraceError):
    """A dependency index of 0."""


@dataclass(frozen=True)
class LemmaNode:
    index: int
    kind: str
    size: int
    deps: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ProofTrace:
    """Column-oriented trace storage.

    ``kinds`` holds ASCII codes, ``dep_ptr``/``dep_idx`` are CSR rows of
    1-based dependency indices in file order.
    """

    kinds: np.ndarray
    sizes: np.ndarray
    dep_ptr: np.ndarray
    dep_idx: np.ndarray

    def __len__(self) -> int:
        return self.sizes.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProofTrace):
            return NotImplemented
        return (
            np.array_equal(self.kinds, other.kinds)
            and np.array_equal(self.sizes, other.sizes)
            and np.array_equal(self.dep_ptr, other.dep_ptr)
            and np.array_equal(self.dep_idx, other.dep_idx)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def num_edges(self) -> int:
        return int(self.dep_idx.shape[0])

    def node(self, index: int) -> LemmaNode:
        if not 1 <= index <= len(self):
            raise IndexError(f"lemma index {index} out of range 1..{len(self)}")
        i = index - 1
        lo, hi = self.dep_ptr[i], self.dep_ptr[i + 1]
        return LemmaNode(
            index=index,
            kind=chr(self.kinds[i]),
            size=int(self.sizes[i]),
            deps=tuple(int(d) for d in self.dep_idx[lo:hi]),
        )

    def __iter__(self) -> Iterator[LemmaNode]:
        for index in range(1, len(self) + 1):
            yield self.node(index)

    @classmethod
    def from_nodes(cls, nodes: Iterable[LemmaNode | tuple]) -> "ProofTrace":
        """Build from ``LemmaNode``s or ``(kind, size, deps)`` tuples, validating as the parser does."""
        kinds = bytearray()
        sizes = array("q")
        ptr = array("q", [0])
        idx = array("q")
        for pos, node in enumerate(nodes, 1):
            if isinstance(node, LemmaNode):
                kind, size, deps = node.kind, node.size, node.deps
            else:
                kind, size, deps = node
            if len(kind) != 1 or not "A" <= kind <= "Z":
                raise TraceSyntaxError(pos, f"bad inference tag {kind!r}")
            if size < 1:
                raise TraceSyntaxError(pos, f"size must be positive, got {size}")
            deps = list(dict.fromkeys(int(d) for d in deps))
            _check_deps(pos, deps, pos)
            kinds.append(ord(kind))
            sizes.append(int(size))
            idx.extend(deps)
            ptr.append(len(idx))
        return _freeze(kinds, sizes, ptr, idx)

    @classmethod
    def from_arrays(cls, kinds, sizes, dep_ptr, dep_idx) -> "ProofTrace":
        """Wrap column arrays without validation (copies, then marks read-only)."""
        arrays = [
            np.array(kinds, dtype=np.uint8),
            np.array(sizes, dtype=np.int64),
            np.array(dep_ptr, dtype=np.int64),
            np.array(dep_idx, dtype=np.int64),
        ]
        for a in arrays:
            a.setflags(write=False)
        return cls(*arrays)


def _freeze(kinds: bytearray, sizes: array, ptr: array, idx: array) -> ProofTrace:
    return ProofTrace.from_arrays(
        np.frombuffer(bytes(kinds), dtype=np.uint8),
        np.frombuffer(sizes, dtype=np.int64) if len(sizes) else (),
        np.frombuffer(ptr, dtype=np.int64),
        np.frombuffer(idx, dtype=np.int64) if len(idx) else (),
    )


def _check_deps(lineno: int, deps: list[int], index: int) -> None:
    for d in deps:
        if d == 0:
            raise DependencyRangeError(lineno, "dependency index 0 is out of range (indices start at 1)")
        if d < 0:
            raise DependencyRangeError(lineno, f"negative dependency index {d}")
        if d >= index:
            raise ForwardReferenceError(lineno, f"dependency {d} >= lemma index {index} (cycle risk)")


def _as_bytes(line) -> bytes:
    return line.encode("ascii") if isinstance(line, str) else line


def parse_trace(stream: BinaryIO | Iterable[bytes],
                progress: Callable[[int], None] | None = None) -> ProofTrace:
    """Parse a trace in one streaming pass.

    ``progress`` is called with the lemma count every million lemmas.
    """
    kinds = bytearray()
    sizes = array("q")
    ptr = array("q", [0])
    idx = array("q")
    index = 0
    for lineno, raw in enumerate(stream, 1):
        raw = _as_bytes(raw)
        cut = raw.find(b"#")
        if cut >= 0:
            raw = raw[:cut]
        parts = raw.split()
        if not parts:
            continue
        index += 1
        head = parts[0]
        tag = head[0]
        if not 65 <= tag <= 90:
            raise TraceSyntaxError(lineno, f"expected an uppercase inference tag, got {head[:1]!r}")
        digits = head[1:]
        if not digits.isdigit():
            raise TraceSyntaxError(lineno, f"non-numeric size {digits.decode('ascii', 'replace')!r}")
        size = int(digits)
        if size < 1:
            raise TraceSyntaxError(lineno, "size must be positive")
        if len(parts) > 1:
            deps = []
            for tok in parts[1:]:
                if not tok.isdigit():
                    raise TraceSyntaxError(lineno, f"non-numeric dependency {tok.decode('ascii', 'replace')!r}")
                deps.append(int(tok))
            if len(deps) > 1 and len(set(deps)) != len(deps):
                deps = list(dict.fromkeys(deps))
            if min(deps) == 0 or max(deps) >= index:
                _check_deps(lineno, deps, index)
            idx.extend(deps)
        kinds.append(tag)
        sizes.append(size)
        ptr.append(len(idx))
        if progress is not None and index % PROGRESS_EVERY == 0:
            progress(index)
    return _freeze(kinds, sizes, ptr, idx)


def loads_trace(data: bytes | str) -> ProofTrace:
    return parse_trace(_as_bytes(data).splitlines())


def read_trace(path, progress=None) -> ProofTrace:
    with open(path, "rb") as fh:
        return parse_trace(fh, progress=progress)


def iter_trace_lines(trace: ProofTrace) -> Iterator[bytes]:
    ptr = trace.dep_ptr.tolist()
    idx = trace.dep_idx.tolist()
    kinds = trace.kinds.tobytes().decode("ascii")
    for i, size in enumerate(trace.sizes.tolist()):
        row = idx[ptr[i]:ptr[i + 1]]
        if row:
            yield f"{kinds[i]}{size} {' '.join(map(str, row))}\n".encode("ascii")
        else:
            yield f"{kinds[i]}{size}\n".encode("ascii")


def write_trace(trace: ProofTrace, stream: BinaryIO) -> None:
    stream.writelines(iter_trace_lines(trace))


def dumps_trace(trace: ProofTrace) -> bytes:
    return b"".join(iter_trace_lines(trace))


# ---------------------------------------------------------------------------
# side files
# ---------------------------------------------------------------------------


def _parse_index(lineno: int, tok: bytes) -> int:
    if not tok.isdigit():
        raise TraceSyntaxError(lineno, f"non-numeric index {tok.decode('utf-8', 'replace')!r}")
    return int(tok)


def load_names(stream: BinaryIO | Iterable[bytes]) -> NamedMap:
    """Read ``INDEX NAME`` lines. A repeated index keeps the last name."""
    names: NamedMap = {}
    for lineno, raw in enumerate(stream, 1):
        parts = _as_bytes(raw).split()
        if not parts:
            continue
        if len(parts) != 2:
            raise TraceSyntaxError(lineno, "expected 'INDEX NAME'")
        index = _parse_index(lineno, parts[0])
        name = parts[1].decode("utf-8", "surrogateescape")
        if index in names:
            log.warning("names line %d: index %d renamed %r -> %r", lineno, index, names[index], name)
        names[index] = name
    return names


def load_normal_forms(stream: BinaryIO | Iterable[bytes]) -> NormalFormMap:
    """Read ``INDEX<TAB>STRING`` lines. A repeated index keeps the last form."""
    forms: NormalFormMap = {}
    for lineno, raw in enumerate(stream, 1):
        raw = _as_bytes(raw).rstrip(b"\r\n")
        if not raw.strip():
            continue
        head, tab, body = raw.partition(b"\t")
        if not tab:
            raise TraceSyntaxError(lineno, "expected 'INDEX<TAB>STRING'")
        index = _parse_index(lineno, head.strip())
        if index in forms:
            log.warning("normal-form line %d: duplicate index %d, keeping the later form", lineno, index)
        forms[index] = body.decode("utf-8", "surrogateescape")
    return forms


def read_names(path) -> NamedMap:
    with open(path, "rb") as fh:
        return load_names(fh)


def read_normal_forms(path) -> NormalFormMap:
    with open(path, "rb") as fh:
        return load_normal_forms(fh)


def dumps_names(names: NamedMap) -> bytes:
    return "".join(f"{i} {names[i]}\n" for i in sorted(names)).encode("utf-8", "surrogateescape")


# ---------------------------------------------------------------------------
# exporters
# ---------------------------------------------------------------------------


def ranking_order(values: np.ndarray) -> np.ndarray:
    """Positions sorted by descending score, ties by ascending position. +inf ranks first."""
    return np.argsort(-np.asarray(values, dtype=np.float64), kind="stable")


def format_score(x: float) -> str:
    return f"{float(x):#.12g}"


def export_ranking(scores, names: NamedMap, k: int) -> bytes:
    """Top-``k`` ranking as ``RANK<TAB>INDEX<TAB>SCORE<TAB>NAME`` lines (``-`` for no name)."""
    values = np.asarray(getattr(scores, "values", scores), dtype=np.float64)
    if k < 0 or k > values.shape[0]:
        raise ValueError(f"k={k} outside 0..{values.shape[0]}")
    order = ranking_order(values)[:k]
    lines = []
    for rank, pos in enumerate(order.tolist(), 1):
        index = pos + 1
        lines.append(f"{rank}\t{index}\t{format_score(values[pos])}\t{names.get(index, '-')}\n")
    return "".join(lines).encode("utf-8", "surrogateescape")


def export_edges(trace: ProofTrace) -> bytes:
    """One ``I J`` line per edge, meaning lemma ``J`` is a direct dependency of ``I``."""
    ptr = trace.dep_ptr.tolist()
    idx = trace.dep_idx.tolist()
    out = []
    for i in range(len(trace)):
        for j in idx[ptr[i]:ptr[i + 1]]:
            out.append(f"{i + 1} {j}\n")
    return "".join(out).encode("ascii")
