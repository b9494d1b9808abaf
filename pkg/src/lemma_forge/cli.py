"""Command-line front end.

Exit status: 0 success, 1 bad input or usage, 2 internal error. Data goes to
``--out`` (default stdout); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from typing import Sequence

from . import kernels, metrics
from .graph import GraphError, build_graph, stats
from .metrics import MetricParams
from .normalize import merge_alpha_variants, prune_variants
from .scenarios import (
    MODES,
    derive_new_graph,
    emit_problems,
    export_chrono_dataset,
    format_problems,
    fully_honest_schedule,
)
from .select import select_schedule
from .trace_io import (
    TraceError,
    dumps_names,
    dumps_trace,
    export_edges,
    export_ranking,
    format_score,
    read_names,
    read_normal_forms,
    read_trace,
)

log = logging.getLogger("lemma_forge")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _emit(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".lemma_forge.")
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _progress(count: int) -> None:
    log.info("parsed %d lemmas", count)


def _load_graph(args):
    trace = read_trace(args.trace, progress=_progress)
    names = read_names(args.names) if getattr(args, "names", None) else {}
    return trace, build_graph(trace, names, set(args.axiom_tags))


def _params(args) -> tuple[str, MetricParams]:
    name, r = metrics.parse_metric(args.metric)
    params = MetricParams(
        r=1.0 if r is None else r,
        f=args.damping,
        pr_tolerance=args.pr_tol,
        pr_max_iters=args.pr_iters,
    )
    return name, params


def _read_lemma_set(path: str) -> set[int]:
    """Lemma indices from a names file or a ranking TSV (index in column 2)."""
    out: set[int] = set()
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            fields = raw.rstrip(b"\r\n").split(b"\t")
            tok = fields[1] if len(fields) >= 2 else raw.split()[0]
            if not tok.strip().isdigit():
                raise TraceError(lineno, f"{path}: non-numeric lemma index")
            out.add(int(tok))
    return out


def _ranking_lines(chosen, names_for) -> bytes:
    return "".join(
        f"{rank}\t{i}\t{format_score(s)}\t{names_for(i)}\n" for rank, (i, s) in enumerate(chosen, 1)
    ).encode("utf-8", "surrogateescape")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_parse_check(args) -> int:
    trace = read_trace(args.trace, progress=_progress)
    if args.edges:
        _emit(args.edges, export_edges(trace))
    _emit(args.out, f"lemmas\t{len(trace)}\nedges\t{trace.num_edges}\n".encode("ascii"))
    return 0


def cmd_stats(args) -> int:
    _, graph = _load_graph(args)
    nf = read_normal_forms(args.nf) if args.nf else {}
    _emit(args.out, stats(graph, nf).to_tsv().encode("ascii"))
    return 0


def cmd_normalize(args) -> int:
    trace = read_trace(args.trace, progress=_progress)
    nf = read_normal_forms(args.nf)
    if not args.prune:
        _emit(args.out, dumps_trace(merge_alpha_variants(trace, nf)))
        return 0
    pruned, remap = prune_variants(trace, nf)
    _emit(args.out, dumps_trace(pruned))
    log.info("pruned %d of %d lemmas", len(trace) - len(pruned), len(trace))
    if args.names:
        if not args.names_out:
            raise UsageError("--prune with --names needs --names-out for the renumbered names")
        moved = {}
        for old, name in sorted(read_names(args.names).items()):
            new = int(remap[old - 1]) if 1 <= old <= len(remap) else 0
            if new == 0 or new in moved:
                log.warning("name %s (lemma %d) has no surviving lemma; dropped", name, old)
                continue
            moved[new] = name
        _emit(args.names_out, dumps_names(moved))
    return 0


def cmd_rank(args) -> int:
    _, graph = _load_graph(args)
    name, params = _params(args)
    scores = metrics.score(graph, name, params)
    _emit(args.out, export_ranking(scores, graph.names, min(args.top, len(graph))))
    return 0


def cmd_select(args) -> int:
    _, graph = _load_graph(args)
    name, params = _params(args)
    named0 = [] if args.from_scratch else graph.named_indices()
    every = args.checkpoint_every or max(args.count, 1)
    width = max(5, len(str(args.count)))
    synthetic = {}

    def label(i: int) -> str:
        return synthetic[i]

    result = None
    for result in select_schedule(graph, name, params, named0, args.count, emit_every=every):
        for rank, (i, _) in enumerate(result.chosen, 1):
            synthetic.setdefault(i, f"LEMMA_{rank:0{width}d}")
        _emit(args.out, _ranking_lines(result.chosen, label))
        log.info("selected %d lemmas", len(result.chosen))
    if args.names_out:
        names = {i: graph.names[i] for i in named0}
        names.update(synthetic)
        _emit(args.names_out, dumps_names(names))
    return 0


def _new_thms(args, graph) -> set[int]:
    best = _read_lemma_set(args.best)
    for i in best:
        if not 1 <= i <= len(graph):
            raise GraphError(f"best lemma {i} out of range 1..{len(graph)}")
    return best | set(graph.named_indices())


def cmd_derive(args) -> int:
    _, graph = _load_graph(args)
    dg = derive_new_graph(graph, _new_thms(args, graph))
    _emit(args.out, "".join(f"{t} {p}\n" for t, p in dg.edges()).encode("ascii"))
    return 0


def cmd_problems(args) -> int:
    _, graph = _load_graph(args)
    dg = derive_new_graph(graph, _new_thms(args, graph))
    problems = emit_problems(graph, dg, graph.named_indices(), args.mode)
    _emit(args.out, format_problems(problems))
    return 0


def cmd_chrono_export(args) -> int:
    _, graph = _load_graph(args)
    dg = derive_new_graph(graph, _new_thms(args, graph))
    _emit(args.out, export_chrono_dataset(graph, dg))
    return 0


def cmd_honest_run(args) -> int:
    _, graph = _load_graph(args)
    name, params = _params(args)
    lines = []
    for j, result in fully_honest_schedule(graph, name, params, args.step, args.count):
        log.info("theorem %d: %d lemmas", j, len(result.chosen))
        lines.extend(f"{j}\t{rank}\t{i}\t{format_score(s)}\n" for rank, (i, s) in enumerate(result.chosen, 1))
    _emit(args.out, "".join(lines).encode("ascii"))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lemma-forge", description="Mine good lemmas from proof traces.")
    ap.add_argument("-q", "--quiet", action="store_true", help="only report warnings and errors")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker cap (default: $LEMMA_FORGE_THREADS or all cores)")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, func, help, graph=True, metric=False, out=True):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--trace", required=True)
        if graph:
            p.add_argument("--names", help="named theorems, 'INDEX NAME' per line")
            p.add_argument("--axiom-tags", default="", metavar="TAGS",
                           help="inference tags that mark axioms, e.g. 'AT' (default: none)")
        if metric:
            p.add_argument("--metric", required=True, help="q1, q1r:<r>, q2, q3, eq1, eq2, pr1..pr5")
            p.add_argument("--damping", type=float, default=0.85)
            p.add_argument("--pr-tol", type=float, default=1e-12)
            p.add_argument("--pr-iters", type=int, default=200)
        if out:
            p.add_argument("--out", default="-")
        return p

    p = command("parse-check", cmd_parse_check, "validate a trace", graph=False)
    p.add_argument("--edges", help="also write the 'I J' edge list here")

    p = command("stats", cmd_stats, "corpus statistics")
    p.add_argument("--nf", help="normal-form file 'INDEX<TAB>STRING'")

    p = command("normalize", cmd_normalize, "merge alpha variants", graph=False)
    p.add_argument("--nf", required=True)
    p.add_argument("--prune", action="store_true", help="drop proofs of merged variants and renumber")
    p.add_argument("--names", help="names file to renumber under --prune")
    p.add_argument("--names-out")

    p = command("rank", cmd_rank, "rank all lemmas by one metric", metric=True)
    p.add_argument("--top", type=int, default=100)

    p = command("select", cmd_select, "greedy best-lemma selection", metric=True)
    p.add_argument("--count", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--from-scratch", action="store_true", help="start from an empty Named set")
    mode.add_argument("--extend", action="store_true", help="start from the named theorems (default)")
    p.add_argument("--checkpoint-every", type=int, default=0, metavar="K",
                   help="rewrite --out after every K selections")
    p.add_argument("--names-out", help="write Named plus the selected lemmas as a names file")

    for name, func, help in (
        ("derive", cmd_derive, "edge list of the derived graph over named + best lemmas"),
        ("chrono-export", cmd_chrono_export, "derived-graph parents in trace order"),
        ("problems", cmd_problems, "one premise problem per named theorem"),
    ):
        p = command(name, func, help)
        p.add_argument("--best", required=True, help="selected lemmas (names file or ranking TSV)")
        if name == "problems":
            p.add_argument("--mode", choices=MODES, default="almost-honest")

    p = command("honest-run", cmd_honest_run, "fully-honest selections on trace prefixes", metric=True)
    p.add_argument("--step", type=int, default=10)
    p.add_argument("--count", type=int, required=True)
    return ap


def _threads(args) -> int | None:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("LEMMA_FORGE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LEMMA_FORGE_THREADS must be an integer, got {env!r}") from None
    return None


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("missing subcommand")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1

    logging.basicConfig(stream=sys.stderr, level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", force=True)
    try:
        kernels.set_threads(_threads(args))
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (TraceError, GraphError, metrics.MetricError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        log.exception("internal error")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
