import itertools
from dataclasses import replace

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balsub.adjuster import (Adjuster, ConnectConfig, adjuster_violations, base_is_minimal, build_simple_adjuster,
                             chain_adjusters, connect_exact_length, connect_exact_length_traced,
                             connect_pair_sum_length, find_path_of_length, verify_adjuster)
from balsub.connect import Expansion, grow_expansion
from balsub.errors import ChainError, InsufficientExpansion, NoCycle, NoPath, ParityMismatch, Unsatisfiable
from balsub.graph_core import Graph, is_path, pi
from conftest import cycle, from_nx, kbip, path_graph


def gadget(offset=0):
    """C4 on offset..offset+3 with pendant offset+4 on offset and offset+5 on offset+1."""
    o = offset
    return [(o, o + 1), (o + 1, o + 2), (o + 2, o + 3), (o + 3, o), (o, o + 4), (o + 1, o + 5)]


def single(v):
    return Expansion(v, frozenset([v]), 0)


def test_simple_adjuster_on_c4_with_pendants():
    g = Graph.from_edges(6, gadget())
    a = build_simple_adjuster(g, 2, 1)
    assert (a.v1, a.v2) == (0, 1)
    assert a.a == {2, 3}
    assert a.f1.members == {0, 4} and a.f2.members == {1, 5}
    assert a.lengths() == [1, 3]
    assert verify_adjuster(g, a, 2, 1)
    assert base_is_minimal(g, a)


def test_simple_adjuster_errors():
    with pytest.raises(NoCycle):
        build_simple_adjuster(path_graph(6), 1, 1)
    with pytest.raises(InsufficientExpansion):
        build_simple_adjuster(cycle(4), 2, 3)
    with pytest.raises(ValueError):
        build_simple_adjuster(cycle(5), 1, 1)


def test_verify_adjuster_rejects_mutations():
    g = Graph.from_edges(6, gadget())
    a = build_simple_adjuster(g, 2, 1)
    short = replace(a, paths=a.paths[:1])
    assert not verify_adjuster(g, short, 2, 1)
    assert any(v.startswith("A4") for v in adjuster_violations(g, short, 2, 1))
    overlap = replace(a, a=a.a | {4})
    assert any(v.startswith("A1") for v in adjuster_violations(g, overlap, 2, 1))
    assert not verify_adjuster(g, a, 3, 1)          # wrong D
    big = replace(a, a=a.a, k=1)
    assert verify_adjuster(g, big, 2, 1)
    assert not verify_adjuster(g, a, 2, 0)          # radius 1 > m = 0; A3 bound 0 too


def test_base_minimality_flag():
    edges = [(i, (i + 1) % 6) for i in range(6)] + [(0, 3), (0, 6), (3, 7)]
    g = Graph.from_edges(8, edges)
    adj = Adjuster(0, Expansion(0, frozenset({0, 6}), 1), 3, Expansion(3, frozenset({3, 7}), 1),
                   frozenset({1, 2, 4, 5}), 1, 3, ((0, 1, 2, 3), (0, 5, 4, 3)))
    assert base_is_minimal(g, adj) is False


def test_chain_of_two_gadgets():
    g = Graph.from_edges(12, gadget(0) + gadget(6) + [(5, 10)])
    a = chain_adjusters(g, 2, 2, 3)
    assert a.k == 2 and verify_adjuster(g, a, 2, 3)
    base = a.base_length
    assert a.lengths() == [base, base + 2, base + 4]
    assert base == 5
    assert (base - pi(g, a.v1, a.v2)) % 2 == 0


def test_chain_base_case_matches_simple():
    g = Graph.from_edges(6, gadget())
    assert chain_adjusters(g, 1, 2, 1) == build_simple_adjuster(g, 2, 1)
    with pytest.raises(ValueError):
        chain_adjusters(g, 0, 2, 1)


def test_chain_reports_stage_and_partial():
    g = Graph.from_edges(12, gadget(0) + gadget(6))
    with pytest.raises(ChainError) as exc:
        chain_adjusters(g, 2, 2, 3)
    assert exc.value.stage == 2
    assert exc.value.partial.k == 1 and verify_adjuster(g, exc.value.partial, 2, 3)
    assert isinstance(exc.value.cause, NoPath)


@pytest.mark.parametrize("dim,r", [(5, 1), (5, 2), (5, 3), (6, 3)])
def test_chain_on_hypercubes(dim, r):
    g = from_nx(nx.hypercube_graph(dim))
    a = chain_adjusters(g, r, 2, 4)
    assert verify_adjuster(g, a, 2, 4)
    assert a.lengths() == [a.base_length + 2 * i for i in range(r + 1)]


def all_disjoint_pair_sums(g, roots):
    """Every total length of vertex-disjoint P, Q joining {r1, r2} to {r3, r4}."""
    h = nx.Graph(list(g.edges()))
    r1, r2, r3, r4 = roots
    sums = set()
    for b, d in ((r3, r4), (r4, r3)):
        for p in nx.all_simple_paths(h, r1, b):
            rest = h.copy()
            rest.remove_nodes_from(p)
            if r2 not in rest or d not in rest:
                continue
            for q in nx.all_simple_paths(rest, r2, d):
                sums.add(len(p) + len(q) - 2)
    return sums


def test_pair_sum_examples():
    g = kbip(4, 4)
    pair = connect_pair_sum_length(g, single(0), single(1), single(2), single(3), 4, 20)
    assert 4 <= pair.total <= 24
    assert not set(pair.p) & set(pair.q)
    assert is_path(g, pair.p) and is_path(g, pair.q)
    assert pair.p[0] == 0 and pair.q[0] == 1 and {pair.p[-1], pair.q[-1]} == {2, 3}
    with pytest.raises(ValueError):
        connect_pair_sum_length(g, single(0), single(0), single(2), single(3), 0, 0)


def test_pair_sum_parity_unsatisfiable():
    g = cycle(8)
    roots = (0, 2, 4, 6)
    sums = all_disjoint_pair_sums(g, roots)
    assert sums == {4}
    for target in (3, 5):
        with pytest.raises(Unsatisfiable) as exc:
            connect_pair_sum_length(g, *(single(r) for r in roots), target, 0)
        assert exc.value.best == 4
    assert connect_pair_sum_length(g, *(single(r) for r in roots), 3, 1).total == 4


def test_pair_sum_lengthening():
    g = from_nx(nx.hypercube_graph(5))
    roots = (0, 3, 12, 15)
    for target in range(4, 16, 2):
        pair = connect_pair_sum_length(g, *(single(r) for r in roots), target, 0)
        assert pair.total == target
        assert not set(pair.p) & set(pair.q)


def test_connect_exact_length_examples():
    c6 = cycle(6)
    assert connect_exact_length(c6, single(0), single(2), 4) == (0, 5, 4, 3, 2)
    with pytest.raises(ParityMismatch):
        connect_exact_length(c6, single(0), single(2), 3)
    g = kbip(4, 4)
    p = connect_exact_length(g, single(0), single(1), 6)
    assert is_path(g, p) and len(p) == 7 and p[0] == 0 and p[-1] == 1
    with pytest.raises(Unsatisfiable):
        connect_exact_length(g, single(0), single(1), 8)


def test_connect_exact_length_uses_the_adjuster_route():
    g = from_nx(nx.hypercube_graph(6))
    f1 = grow_expansion(g, 0, 2, 3)
    f2 = grow_expansion(g, 63, 2, 3, f1.members)
    out = connect_exact_length_traced(g, f1, f2, 16, (), ConnectConfig(use_direct=False))
    assert out.route == "adjuster" and len(out.path) == 17 and is_path(g, out.path)
    assert verify_adjuster(g, out.adjuster, 2, 8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 9))
def test_connect_exact_length_outputs_are_valid(seed, half):
    g = from_nx(nx.hypercube_graph(5))
    rng = __import__("random").Random(seed)
    u, v = rng.sample(range(32), 2)
    ell = 2 * half + (bin(u ^ v).count("1") % 2)
    avoid = set(rng.sample([w for w in range(32) if w not in (u, v)], 3))
    try:
        p = connect_exact_length(g, single(u), single(v), ell, avoid)
    except Unsatisfiable:
        return
    assert is_path(g, p) and len(p) - 1 == ell and (p[0], p[-1]) == (u, v) and not set(p) & avoid


def test_find_path_of_length_exhaustive_small():
    g = kbip(3, 3)
    h = nx.Graph(list(g.edges()))
    for ell in range(1, 7):
        for s, t in itertools.permutations(range(6), 2):
            want = any(len(p) - 1 == ell for p in nx.all_simple_paths(h, s, t))
            got = find_path_of_length(g, s, t, ell)
            assert (got is not None) == want
            if got:
                assert is_path(g, got) and len(got) - 1 == ell
