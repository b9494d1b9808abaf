import random

from lemma_forge import loads_trace, merge_alpha_variants
from lemma_forge.normalize import canonical_map, prune_variants
from lemma_forge.trace_io import ProofTrace


def inject_variants(rng: random.Random, n_max: int = 40):
    """Random trace plus a normal-form map with a few planted equivalence classes."""
    n = rng.randint(2, n_max)
    nodes = []
    for i in range(1, n + 1):
        k = rng.randint(0, min(4, i - 1))
        nodes.append((rng.choice("ARCE"), rng.randint(1, 20), tuple(rng.sample(range(1, i), k))))
    trace = ProofTrace.from_nodes(nodes)
    classes = rng.randint(1, max(1, n // 3))
    nf = {i: f"form{rng.randrange(classes)}" for i in range(1, n + 1) if rng.random() < 0.7}
    return trace, nf


def test_example_rewrites_to_earliest():
    t = loads_trace("A3\nC5 1\nC5 1\nC7 3\n")
    out = merge_alpha_variants(t, {2: "x=x", 3: "x=x"})
    assert len(out) == 4
    assert out.node(4).deps == (2,)
    assert out.node(3).deps == (1,)


def test_empty_map_is_identity():
    t = loads_trace("A3\nC5 1\nC5 1 2\nC7 3 2\n")
    assert merge_alpha_variants(t, {}) == t


def test_rewrite_dedupes_preserving_first_occurrence():
    t = loads_trace("A1\nA1\nA1\nC2 3 1 2\n")
    out = merge_alpha_variants(t, {1: "p", 3: "p"})
    assert out.node(4).deps == (1, 2)


def test_random_properties():
    rng = random.Random(42)
    for _ in range(100):
        trace, nf = inject_variants(rng)
        once = merge_alpha_variants(trace, nf)
        assert merge_alpha_variants(once, nf) == once
        assert len(once) == len(trace)
        first = {}
        for i in sorted(nf):
            first.setdefault(nf[i], i)
        for node in once:
            old = trace.node(node.index).deps
            for d in node.deps:
                if d in nf:
                    assert first[nf[d]] == d
            # endpoints only decrease, and each old dep maps to its class's first member
            expected = list(dict.fromkeys(first[nf[d]] if d in nf else d for d in old))
            assert list(node.deps) == expected
        referenced = {d for node in once for d in node.deps}
        classes = {nf[d] if d in nf else ("own", d) for node in trace for d in node.deps}
        assert len(referenced) == len(classes)


def test_prune_drops_variant_proofs():
    # 3 is a variant of 2 with its own proof step 4 -> 3; 5 uses the variant
    t = loads_trace("A1\nC2 1\nR2\nC3 3\nC4 4 1\nR9\n")
    nf = {2: "eq", 4: "eq"}
    pruned, remap = prune_variants(t, nf)
    # lemma 4 is a variant of 2 and goes; 3 was only used by 4 and goes too
    assert len(pruned) == 4
    assert remap.tolist() == [1, 2, 0, 2, 3, 4]
    assert pruned.node(3).deps == (2, 1)
    assert pruned.node(4).deps == ()


def test_prune_keeps_graph_closed():
    rng = random.Random(9)
    for _ in range(50):
        trace, nf = inject_variants(rng)
        pruned, remap = prune_variants(trace, nf)
        canon = canonical_map(len(trace), nf)
        own = [i for i in range(1, len(trace) + 1) if canon[i - 1] == i - 1]
        kept = [i for i in own if remap[i - 1] > 0]
        assert len(pruned) == len(kept)
        assert [remap[i - 1] for i in kept] == list(range(1, len(kept) + 1))
        for node in pruned:
            assert all(1 <= d < node.index for d in node.deps)
        for i in range(1, len(trace) + 1):
            if canon[i - 1] != i - 1:
                assert remap[i - 1] == remap[canon[i - 1]]
