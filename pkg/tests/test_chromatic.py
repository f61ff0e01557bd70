import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphzeta.chromatic import (ChromaticPoly, chromatic_function, chromatic_polynomial,
                                 coloring_count_bruteforce, contract_edge, delete_edge,
                                 same_color_subgraph)
from graphzeta.errors import DomainError, ResourceLimitError
from graphzeta.graph import (EdgeSubgraph, Graph, complete_graph, contract_to_star_graph,
                             edgeless_graph, enumerate_realizable_edge_subgraphs, path_graph,
                             star_graph)

from _util import random_graph

TRIANGLE_PENDANT = Graph(4, ((0, 1), (0, 2), (1, 2), (2, 3)))
X = ChromaticPoly.monomial(1)


def _power(base, k):
    out = ChromaticPoly((1,))
    for _ in range(k):
        out = out * base
    return out


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, tuple(e for e, k in zip(pairs, keep) if k))


def test_known_polynomials():
    assert chromatic_polynomial(complete_graph(4)) == ChromaticPoly.falling_factorial(4)
    assert chromatic_polynomial(edgeless_graph(3)) == ChromaticPoly.monomial(3)
    assert chromatic_polynomial(star_graph(5)) == X * _power(X - ChromaticPoly((1,)), 4)
    c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    # cycle: (x-1)^n + (-1)^n (x-1)
    x1 = X - ChromaticPoly((1,))
    assert chromatic_polynomial(c4) == _power(x1, 4) + x1
    assert chromatic_polynomial(TRIANGLE_PENDANT) == ChromaticPoly.falling_factorial(3) * x1
    assert str(chromatic_polynomial(complete_graph(3))) == "x^3 - 3*x^2 + 2*x"


def test_triangle_pendant_colouring_functions():
    total = ChromaticPoly((0,))
    for h in enumerate_realizable_edge_subgraphs(TRIANGLE_PENDANT):
        total = total + chromatic_function(TRIANGLE_PENDANT, h)
        for p in (2, 3, 5, 7):
            assert chromatic_function(TRIANGLE_PENDANT, h)(p) == coloring_count_bruteforce(TRIANGLE_PENDANT, h, p)
    assert total == ChromaticPoly.monomial(4)
    edgeless = EdgeSubgraph(TRIANGLE_PENDANT, frozenset())
    # G itself as the star graph: P(G) = x(x-1)^2(x-2)
    assert chromatic_function(TRIANGLE_PENDANT, edgeless) == chromatic_polynomial(TRIANGLE_PENDANT)


def test_non_realizable_rejected():
    k3 = complete_graph(3)
    with pytest.raises(DomainError):
        chromatic_function(k3, EdgeSubgraph(k3, frozenset({0, 1})))


def test_bruteforce_guard():
    g = edgeless_graph(8)
    with pytest.raises(ResourceLimitError):
        coloring_count_bruteforce(g, EdgeSubgraph(g, frozenset()), 10)


def test_same_color_subgraph():
    assert same_color_subgraph(TRIANGLE_PENDANT, [0, 0, 1, 1]).kept == frozenset({0, 3})


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_structure(g):
    poly = chromatic_polynomial(g)
    assert poly.degree == g.n
    assert poly.coefficients[-1] == 1
    assert poly(0) == 0
    # coefficient of x^(n-1) is -|E|, and signs alternate
    if g.n >= 2:
        assert poly.coefficients[g.n - 1] == -g.num_edges
    for i, c in enumerate(poly.coefficients):
        assert c == 0 or (c > 0) == ((g.n - i) % 2 == 0)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.integers(0, 30))
def test_deletion_contraction(g, pick):
    if not g.num_edges:
        return
    u, v = g.edges[pick % g.num_edges]
    assert chromatic_polynomial(g) == chromatic_polynomial(delete_edge(g, u, v)) - chromatic_polynomial(contract_edge(g, u, v))


@settings(max_examples=40, deadline=None)
@given(graphs(max_n=5), st.sampled_from([2, 3, 5]))
def test_colouring_counts_and_partition_identity(g, p):
    total = 0
    for h in enumerate_realizable_edge_subgraphs(g):
        c = chromatic_function(g, h)(p)
        assert c == coloring_count_bruteforce(g, h, p)
        total += c
    assert total == p**g.n


def test_random_graphs_against_counting():
    rng = random.Random(13)
    for _ in range(15):
        g = random_graph(6, 0.5, rng)
        for p in (2, 3):
            poly = chromatic_polynomial(g)
            proper = coloring_count_bruteforce(g, EdgeSubgraph(g, frozenset()), p)
            assert poly(p) == proper
