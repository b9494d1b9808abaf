"""Lemma mining over LCF-style proof traces."""

from .graph import GraphStats, ProofGraph, build_graph, prefix_subgraph, stats
from .metrics import (
    MetricParams,
    ScoreVector,
    compute_D,
    compute_L,
    compute_U,
    pagerank,
    pr_quality,
    quality,
    score,
)
from .normalize import merge_alpha_variants, prune_variants
from .scenarios import (
    DerivedGraph,
    Problem,
    chain_closure,
    closest_named_ancestors,
    derive_new_graph,
    emit_problems,
    export_chrono_dataset,
    fully_honest_schedule,
)
from .select import SelectionResult, best_lemmas, select_schedule
from .trace_io import (
    LemmaNode,
    ProofTrace,
    dumps_trace,
    export_edges,
    export_ranking,
    load_names,
    load_normal_forms,
    loads_trace,
    parse_trace,
    write_trace,
)

__version__ = "0.1.0"
