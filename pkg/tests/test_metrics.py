import math
import random

import numpy as np
import pytest

from lemma_forge import (
    MetricParams,
    build_graph,
    compute_D,
    compute_L,
    compute_U,
    loads_trace,
    pagerank,
    pr_quality,
    quality,
    score,
)
from lemma_forge.metrics import MetricError, parse_metric
from lemma_forge.synth import doubling_ladder, random_trace
from oracles import dense_pagerank, direct_quality, naive_base, random_graph, rel_close

P = MetricParams()


def base(g):
    return compute_D(g), compute_U(g), compute_L(g)


def test_g5_base_vectors(g5):
    D, U, L = base(g5)
    assert D.tolist() == [1, 1, 2, 3, 1]
    assert U.tolist() == [3, 2, 2, 1, 1]
    assert L.tolist() == [1, 1, 2, 3, 1]


def test_g5_quality_node3(g5):
    D, U, L = base(g5)
    q = {m: quality(g5, D, U, L, P, m)[3] for m in ("Q1", "Q2", "Q3", "EQ1", "EQ2")}
    assert q["Q1"] == pytest.approx(0.8, rel=1e-12)
    assert q["Q2"] == pytest.approx(0.16, rel=1e-12)
    assert q["Q3"] == pytest.approx(4 / 1.1 ** 5, rel=1e-12)
    assert round(q["Q3"], 5) == 2.48369
    assert q["EQ1"] == pytest.approx(0.4) and q["EQ2"] == pytest.approx(0.4)


def test_g5_q1r_node4(g5):
    D, U, L = base(g5)
    q0 = quality(g5, D, U, L, MetricParams(r=0.0), "Q1R")[4]
    q2 = quality(g5, D, U, L, MetricParams(r=2.0), "Q1R")[4]
    assert q0 == pytest.approx(9 / 7, rel=1e-12)
    assert q2 == pytest.approx(1 / 7, rel=1e-12)


def test_g5_q1_vector(g5):
    assert score(g5, "Q1").tolist()[:4] == pytest.approx([1.0, 2 / 3, 0.8, 3 / 7])


def test_short_circuit_cases():
    deps = " ".join(str(i) for i in range(1, 51))
    t = loads_trace("A1\n" * 50 + f"C5 {deps}\n" + "C1 51\n" * 50)
    g = build_graph(t, {51: "BIG"}, {"A"})
    assert compute_D(g)[51] == 1
    assert compute_U(g)[51] == 1


def test_zero_conventions():
    g = build_graph(loads_trace("R5\nR3\nC4 2\n"), {}, set())
    assert compute_D(g).tolist() == [0, 0, 0]
    assert compute_U(g)[1] == 0
    assert compute_L(g).tolist() == [0, 0, 1]
    assert compute_L(build_graph(loads_trace("A5\n"), {}, {"A"})).tolist() == [1]


def test_zero_characterization():
    # the base cases give zero; in general zero means no named/axiom lemma is reachable
    rng = random.Random(7)
    for _ in range(100):
        g = random_graph(rng)
        D, U = compute_D(g), compute_U(g)
        stop_d = {i for i in range(1, len(g) + 1) if g.is_named(i) or g.is_axiom(i)}
        for i in range(1, len(g) + 1):
            if not g.is_named(i) and not g.is_axiom(i) and not g.deps(i):
                assert D[i] == 0
            if not g.is_named(i) and not g.uses(i):
                assert U[i] == 0
            assert (D[i] == 0) == (not reaches(g.deps, i, stop_d))
            assert (U[i] == 0) == (not reaches(g.uses, i, set(g.named_indices())))


def reaches(step, i, targets):
    """True if ``i`` is in ``targets`` or reaches one while walking through non-targets."""
    todo, seen = [i], set()
    while todo:
        x = todo.pop()
        if x in targets:
            return True
        if x not in seen:
            seen.add(x)
            todo.extend(step(x))
    return False


def test_naming_sets_d_and_u_to_one():
    rng = random.Random(8)
    for _ in range(50):
        g = random_graph(rng)
        j = rng.randint(1, len(g))
        g2 = g.with_named(set(g.named_indices()) | {j})
        assert compute_D(g2)[j] == 1 and compute_U(g2)[j] == 1


def test_matches_recursive_oracle_small():
    rng = random.Random(1)
    for _ in range(60):
        g = random_graph(rng)
        D, U, L = naive_base(g, set(g.named_indices()))
        assert compute_D(g).tolist() == D
        assert compute_U(g).tolist() == U
        assert compute_L(g).tolist() == L
        assert compute_D(g, exact=True) == D
        assert compute_U(g, exact=True) == U


@pytest.mark.parametrize("metric,r", [("Q1", 1.0), ("Q1R", 0.0), ("Q1R", 0.5), ("Q1R", 1.5), ("Q1R", 2.0),
                                      ("Q2", 1.0), ("Q3", 1.0), ("EQ1", 1.0), ("EQ2", 1.0)])
def test_quality_matches_direct_formula(metric, r):
    rng = random.Random(hash(metric) % 1000 + int(r * 10))
    params = MetricParams(r=r)
    for _ in range(40):
        g = random_graph(rng)
        D, U, L = naive_base(g, set(g.named_indices()))
        got = score(g, metric, params).tolist()
        for i in range(len(g)):
            want = direct_quality(metric, D[i], U[i], L[i], g.size(i + 1), r)
            assert rel_close(got[i], want, 1e-12), (metric, i, got[i], want)


def test_q1r_at_one_is_q1_and_q2_times_s_is_q1():
    rng = random.Random(4)
    for _ in range(40):
        g = random_graph(rng)
        q1 = score(g, "Q1").values
        assert np.array_equal(score(g, "Q1R", MetricParams(r=1.0)).values, q1)
        q2s = score(g, "Q2").values * g.sizes
        assert np.allclose(q2s, q1, rtol=1e-15, atol=0)


def test_unknown_metric(g5):
    D, U, L = base(g5)
    with pytest.raises(MetricError):
        quality(g5, D, U, L, P, "Q9")
    with pytest.raises(MetricError):
        parse_metric("q7")


def test_parse_metric():
    assert parse_metric("q1r:0.5") == ("Q1R", 0.5)
    assert parse_metric("PR2") == ("PR2", None)
    with pytest.raises(MetricError):
        parse_metric("q1r")
    with pytest.raises(MetricError):
        parse_metric("q2:3")


@pytest.mark.parametrize("kw", [dict(f=0.0), dict(f=1.0), dict(pr_tolerance=0), dict(r=2.5), dict(pr_max_iters=0)])
def test_params_validation(kw):
    with pytest.raises(MetricError):
        MetricParams(**kw)


def test_pagerank_single_node():
    g = build_graph(loads_trace("A4\n"), {}, set())
    assert pagerank(g, P).tolist() == pytest.approx([1.0])
    assert pr_quality(g, P, "PR2").tolist() == pytest.approx([0.25])


def test_pagerank_two_node_chain_closed_form():
    f = 0.85
    # node 1 dangling, node 2 -> 1; solve x = (1-f)/2 + f (P x + dangling/2)
    A = np.eye(2) - f * np.array([[0.5, 1.0], [0.5, 0.0]])
    x = np.linalg.solve(A, np.full(2, (1 - f) / 2))
    g = build_graph(loads_trace("A3\nC5 1\n"), {}, set())
    pr1 = pagerank(g, P).values
    assert pr1 == pytest.approx(x, abs=1e-10)
    assert pr1 == pytest.approx([0.649123, 0.350877], abs=1e-6)
    assert pr_quality(g, P, "PR2").values == pytest.approx([0.216374, 0.070175], abs=1e-6)


def test_pagerank_empty_graph_errors():
    with pytest.raises(MetricError):
        pagerank(build_graph(loads_trace(""), {}, set()), P)


def test_pagerank_matches_dense_oracle_and_sums_to_one():
    rng = random.Random(13)
    for _ in range(20):
        g = random_graph(rng, max_nodes=60)
        for direction in ("forward", "reverse"):
            got = pagerank(g, P, direction).values
            want = dense_pagerank(g, 0.85, direction)
            assert np.max(np.abs(got - want)) < 1e-8
            assert abs(got.sum() - 1) < 1e-9
            assert (got >= 0).all()


def test_pr_family_composition(g5):
    pr1 = pagerank(g5, P, "forward").values
    pr3 = pagerank(g5, P, "reverse").values
    S = g5.sizes
    assert np.array_equal(pr_quality(g5, P, "PR1").values, pr1)
    assert np.array_equal(pr_quality(g5, P, "PR2").values, pr1 / S)
    assert np.array_equal(pr_quality(g5, P, "PR3").values, pr3)
    assert np.array_equal(pr_quality(g5, P, "PR4").values, pr3 / S)
    assert np.array_equal(pr_quality(g5, P, "PR5").values, (pr1 + pr3) / S)


def test_ladder_saturates_to_infinity():
    g = build_graph(doubling_ladder(1100), {}, {"A"})
    D = compute_D(g).values
    assert np.all(D[1:] >= D[:-1])
    # lemma i holds 2**(i-2): position 1024 is lemma 1025 = 2**1023, the next one overflows
    assert D[1024] == 2.0 ** 1023
    assert math.isinf(D[1025]) and math.isinf(D[-1])
    exact = compute_D(g, exact=True)
    assert exact[-1] == 2 ** 1098
    # saturated counts must not turn into NaN downstream
    for m in ("Q1", "Q2", "Q3", "EQ1"):
        assert not np.isnan(score(g, m).values).any()


def test_no_nan_on_large_random_trace():
    g = build_graph(random_trace(20_000, seed=3), {}, {"A"})
    for m in ("Q1", "Q1R", "Q2", "Q3", "EQ1", "EQ2"):
        assert not np.isnan(score(g, m, MetricParams(r=0.5)).values).any()
