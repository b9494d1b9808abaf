"""The numba and plain paths must agree bit for bit."""

import numpy as np
import pytest

from lemma_forge import build_graph, kernels
from lemma_forge.metrics import _sorted_rows
from lemma_forge.synth import random_trace

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture(scope="module")
def graph():
    names = {i: "x" for i in range(1, 5001, 97)}
    return build_graph(random_trace(5000, seed=21), names, {"A"})


def test_sum_pass_backends_agree(graph):
    stop = graph.named | graph.axiom
    a = kernels.sum_pass(graph.dep_ptr, graph.dep_idx, stop, use_jit=True)
    b = kernels.sum_pass(graph.dep_ptr, graph.dep_idx, stop, use_jit=False)
    assert np.array_equal(a, b)
    a = kernels.sum_pass(graph.use_ptr, graph.use_idx, graph.named, descending=True, use_jit=True)
    b = kernels.sum_pass(graph.use_ptr, graph.use_idx, graph.named, descending=True, use_jit=False)
    assert np.array_equal(a, b)


def test_chain_pass_backends_agree(graph):
    stop = graph.named | graph.axiom
    assert np.array_equal(kernels.chain_pass(graph.dep_ptr, graph.dep_idx, stop, use_jit=True),
                          kernels.chain_pass(graph.dep_ptr, graph.dep_idx, stop, use_jit=False))


@pytest.mark.parametrize("direction", ["forward", "reverse"])
def test_pagerank_backends_agree(graph, direction):
    if direction == "forward":
        args = (graph.use_ptr, graph.use_idx, np.diff(graph.dep_ptr))
    else:
        args = (graph.dep_ptr, _sorted_rows(graph.dep_ptr, graph.dep_idx), np.diff(graph.use_ptr))
    a, ia = kernels.pagerank(*args, 0.85, 1e-12, 200, use_jit=True)
    b, ib = kernels.pagerank(*args, 0.85, 1e-12, 200, use_jit=False)
    assert ia == ib
    assert np.array_equal(a, b)


def test_exact_pass_is_integer():
    g = build_graph(random_trace(300, seed=1), {}, {"A"})
    exact = kernels.sum_pass_exact(g.dep_ptr, g.dep_idx, g.axiom)
    assert all(isinstance(v, int) for v in exact)
    approx = kernels.sum_pass(g.dep_ptr, g.dep_idx, g.axiom)
    assert [float(v) for v in exact] == approx.tolist()


def test_set_threads_clamps():
    assert kernels.set_threads(10_000) >= 1
    assert kernels.set_threads(0) == 1
    kernels.set_threads(None)
