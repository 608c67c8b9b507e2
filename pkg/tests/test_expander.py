import math
import warnings

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balsub.errors import ExtractionFailed
from balsub.expander import (ExpanderParams, ExpansionBudget, check_degree_guarantees, epsilon,
                             extract_bipartite_expander, extract_expander, max_cut_sides, verify_expander, violates)
from balsub.graph_core import Graph, degree_stats
from conftest import cycle, from_nx, kbip

# 1/ln(3)^2 evaluated at 30 digits with mpmath
EPS_1_5 = 0.828535449690223


def brute_force_holds(g, params):
    for r in range(1, g.n + 1):
        for xs in __import__("itertools").combinations(range(g.n), r):
            if violates(g, xs, params):
                return False
    return True


def test_params_validation():
    for bad in [dict(epsilon1=0, k=1), dict(epsilon1=1, k=1), dict(epsilon1=0.5, k=0),
                dict(epsilon1=0.5, k=1, epsilon2=1.5)]:
        with pytest.raises(ValueError):
            ExpanderParams(**bad)


def test_epsilon_examples():
    p = ExpanderParams(0.5, 6.0)
    assert epsilon(1.0, p) == 0
    q = ExpanderParams(0.999999999, 5.0)
    assert epsilon(1, ExpanderParams(0.5, 5.0)) == pytest.approx(0.5 * EPS_1_5, rel=1e-12)
    assert epsilon(1, q) == pytest.approx(EPS_1_5, rel=1e-8)
    with pytest.raises(ValueError):
        epsilon(-1, p)


@pytest.mark.parametrize("k", [0.5, 2.0, 7.0, 40.0])
def test_epsilon_shape(k):
    p = ExpanderParams(0.5, k)
    # x * eps(x) only rises once 15x/k > e^2, i.e. from about 0.49k on, so the
    # grid starts at the smallest checked set size k/2
    grid = [k / 2, k, 10 * k, 100 * k]
    prods = [epsilon(x, p) * x for x in grid]
    assert prods == sorted(prods)
    assert epsilon(k / 5, p) * (k / 5) > epsilon(k, p) * k
    fine = [k / 2 * 1.05 ** i for i in range(80)]
    prods = [epsilon(x, p) * x for x in fine]
    assert all(a <= b for a, b in zip(prods, prods[1:]))
    fine = [k / 2 * 1.1 ** i for i in range(60)]
    vals = [epsilon(x, p) for x in fine]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_verify_examples():
    tri2 = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    rep = verify_expander(tri2, ExpanderParams(0.5, 6.0), mode="exact")
    assert not rep.holds and rep.witness in ({0, 1, 2}, {3, 4, 5})
    assert verify_expander(from_nx(nx.complete_graph(4)), ExpanderParams(0.5, 2.0), mode="exact").holds
    k2 = Graph.from_edges(2, [(0, 1)])
    assert verify_expander(k2, ExpanderParams(0.5, 2.0), mode="exact").holds


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 9), st.floats(0.2, 6.0), st.data())
def test_exact_mode_matches_brute_force(n, k, data):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    g = Graph.from_edges(n, edges)
    params = ExpanderParams(0.5, k)
    rep = verify_expander(g, params, mode="exact")
    assert rep.holds == brute_force_holds(g, params)
    if not rep.holds:
        assert violates(g, rep.witness, params)


def test_connected_enumeration_above_cap():
    g = from_nx(nx.random_regular_graph(3, 26, seed=1))
    rep = verify_expander(g, ExpanderParams(0.5, 2.0), ExpansionBudget(exhaustive_cap=20, size_cap=5), mode="exact")
    assert rep.mode == "exact" and rep.subsets_checked > 0
    two = from_nx(nx.disjoint_union(nx.random_regular_graph(3, 14, seed=2), nx.random_regular_graph(3, 14, seed=3)))
    rep = verify_expander(two, ExpanderParams(0.5, 2.0), mode="sampled", seed=1)
    assert not rep.holds and violates(two, rep.witness, ExpanderParams(0.5, 2.0))


def test_extract_examples():
    two_k5 = from_nx(nx.disjoint_union(nx.complete_graph(5), nx.complete_graph(5)))
    r = extract_expander(two_k5)
    assert r.subgraph.n == 5 and r.subgraph.m == 10 and check_degree_guarantees(two_k5, r.subgraph)
    k88 = kbip(8, 8)
    r = extract_expander(k88)
    assert check_degree_guarantees(k88, r.subgraph) and r.report.holds and r.report.mode == "exact"
    edge = Graph.from_edges(2, [(0, 1)])
    assert extract_expander(edge).subgraph.m == 1
    with pytest.raises(ValueError):
        extract_expander(Graph.from_edges(3, []))


@pytest.mark.parametrize("seed", range(6))
def test_extract_random_inputs(seed):
    g = from_nx(nx.gnp_random_graph(40, 0.12, seed=seed))
    if g.m == 0:
        return
    r = extract_expander(g, seed=seed)
    assert check_degree_guarantees(g, r.subgraph)
    assert all(r.origin[i] < g.n for i in range(r.subgraph.n))
    for u, v in r.subgraph.edges():
        assert g.has_edge(r.origin[u], r.origin[v])


def test_max_cut_keeps_half():
    for seed in range(5):
        g = from_nx(nx.gnp_random_graph(30, 0.3, seed=seed))
        sides = max_cut_sides(g)
        crossing = sum(1 for u, v in g.edges() if sides[u] != sides[v])
        assert 2 * crossing >= g.m


def test_extract_bipartite_examples():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = extract_bipartite_expander(kbip(8, 8), 2)
        assert r.subgraph.n == 16 and r.min_degree == 8
        warnings.simplefilter("ignore")
        r = extract_bipartite_expander(cycle(4), 1)
        assert r.subgraph.n == 4
        star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
        with pytest.raises(ExtractionFailed) as exc:
            extract_bipartite_expander(star, 2)
        assert "average_degree" in exc.value.diagnostics
    with pytest.raises(ValueError):
        extract_bipartite_expander(cycle(4), 1, strict=True)


def test_extract_bipartite_output_is_bipartite():
    g = from_nx(nx.gnp_random_graph(30, 0.4, seed=7))
    r = extract_bipartite_expander(g, 1)
    assert r.subgraph.sides is not None
    assert degree_stats(r.subgraph).minimum >= 1
