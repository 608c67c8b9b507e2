import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balsub.errors import BudgetExceeded, GraphFormatError
from balsub.graph_core import Graph
from balsub.verify import (OracleLimits, SubdivisionCertificate, make_certificate, oracle_at_ell,
                           oracle_max_subdivision, verify_subdivision)
from conftest import NAMED, cycle, from_nx, kbip


def c6_cert(ell=2):
    return make_certificate([0, 2, 4], [(0, 1, 2), (2, 3, 4), (4, 5, 0)], ell)


def k4_cert():
    return make_certificate(range(4), [(u, v) for u, v in itertools.combinations(range(4), 2)], 1)


def test_verify_examples(c6):
    assert verify_subdivision(c6, c6_cert())
    assert verify_subdivision(from_nx(nx.complete_graph(4)), k4_cert())
    rep = verify_subdivision(c6, c6_cert(3))
    assert not rep and rep.clause == "d"


def test_each_clause_detected(c6):
    base = c6_cert()
    missing = SubdivisionCertificate(base.cores, {k: v for k, v in base.paths.items() if k != (0, 2)}, 2)
    assert verify_subdivision(c6, missing).clause == "a"
    extra = SubdivisionCertificate(base.cores, dict(base.paths, **{}), 2)
    extra.paths[(1, 3)] = (1, 2, 3)
    assert verify_subdivision(c6, extra).clause == "a"
    ends = SubdivisionCertificate(base.cores, dict(base.paths), 2)
    ends.paths[(0, 2)] = (0, 1, 0)
    assert verify_subdivision(c6, ends).clause == "b"
    non_edge = SubdivisionCertificate(base.cores, dict(base.paths), 2)
    non_edge.paths[(0, 2)] = (0, 3, 2)
    assert verify_subdivision(c6, non_edge).clause == "c"
    # two paths through the same middle vertex (K_{2,2,...}: cores 0,1,2 all joined to 3 and 4)
    g = Graph.from_edges(5, [(c, m) for c in range(3) for m in (3, 4)])
    shared = make_certificate([0, 1, 2], [(0, 3, 1), (0, 3, 2), (1, 4, 2)], 2)
    rep = verify_subdivision(g, shared)
    assert rep.clause == "e" and rep.pair == (0, 2)
    through_core = make_certificate([0, 1], [(0, 3, 1)], 2)
    assert verify_subdivision(g, through_core)
    c = make_certificate([0, 1, 2], [(0, 3, 1), (1, 4, 2), (0, 4, 2)], 2)
    assert verify_subdivision(g, c).clause == "e"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["a", "b", "c", "d"]), st.integers(0, 100))
def test_single_clause_mutations(clause, salt):
    g = kbip(9, 9)
    cert = make_certificate([0, 1, 2], [(0, 9, 1), (0, 10, 2), (1, 11, 2)], 2)
    assert verify_subdivision(g, cert)
    key = sorted(cert.paths)[salt % 3]
    paths = dict(cert.paths)
    if clause == "a":
        del paths[key]
    elif clause == "b":
        p = paths[key]
        other = ({0, 1, 2} - set(key)).pop()
        paths[key] = (p[0], p[1], other)
    elif clause == "c":
        p = paths[key]
        paths[key] = (p[0], 3, p[2])
    else:
        p = paths[key]
        paths[key] = (p[0], p[1], 5 + salt % 3, 12 + salt % 5, p[2])
    rep = verify_subdivision(g, SubdivisionCertificate(cert.cores, paths, 2))
    assert rep.clause == clause


def test_certificate_text_round_trip(tmp_path):
    cert = c6_cert()
    assert cert.to_text().splitlines()[:2] == ["tkcert k=3 ell=2", "cores: 0 2 4"]
    assert "path 0 4: 0 5 4" in cert.to_text()
    f = tmp_path / "c.tkc"
    cert.write(f)
    assert SubdivisionCertificate.read(f) == cert
    for bad in ["", "tkcert k=1\ncores: 0\n", "tkcert k=2 ell=1\ncores: 0\n", "tkcert k=2 ell=1\ncores: 0 1\npath 0: 0 1\n"]:
        with pytest.raises(GraphFormatError):
            SubdivisionCertificate.from_text(bad)


def test_oracle_examples():
    r = oracle_max_subdivision(NAMED["K5"](), 5)
    assert (r.best_k, r.best_ell) == (5, 1)
    r = oracle_max_subdivision(NAMED["K44"](), 6)
    assert (r.best_k, r.best_ell) == (3, 2)
    r = oracle_max_subdivision(NAMED["C5"](), 5)
    assert r.best_k == 2
    for name, make in NAMED.items():
        g = make()
        r = oracle_max_subdivision(g, 4)
        assert verify_subdivision(g, r.witness), name
        assert r.witness.k == r.best_k and r.witness.ell == r.best_ell


def test_oracle_degenerate_and_limits():
    assert oracle_max_subdivision(Graph.from_edges(3, []), 3).best_k == 1
    assert oracle_max_subdivision(Graph(0, []), 3).best_k == 0
    with pytest.raises(ValueError):
        oracle_max_subdivision(from_nx(nx.path_graph(20)), 3)
    with pytest.raises(BudgetExceeded) as exc:
        oracle_max_subdivision(NAMED["Petersen"](), 6, OracleLimits(max_nodes=5))
    assert exc.value.best.best_k >= 2


def brute_force_max_k(g, ell):
    """Independent check: try every core set and every assignment of paths via networkx."""
    h = nx.Graph(list(g.edges()))
    h.add_nodes_from(range(g.n))
    best = 1 if g.n else 0
    for k in range(2, g.n + 1):
        found = False
        for cores in itertools.combinations(range(g.n), k):
            pairs = list(itertools.combinations(cores, 2))
            options = []
            for u, v in pairs:
                options.append([p for p in nx.all_simple_paths(h, u, v, cutoff=ell)
                                if len(p) - 1 == ell and not set(p[1:-1]) & set(cores)])

            def rec(i, used):
                if i == len(pairs):
                    return True
                return any(rec(i + 1, used | set(p[1:-1])) for p in options[i] if not used & set(p[1:-1]))

            if all(options) and rec(0, frozenset()):
                found = True
                break
        if not found:
            break
        best = k
    return best


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_oracle_matches_brute_force(seed, ell):
    h = nx.gnp_random_graph(6, 0.55, seed=seed)
    g = from_nx(h)
    r = oracle_at_ell(g, ell)
    assert (r.best_k if r else 0) == brute_force_max_k(g, ell) or (r is None and brute_force_max_k(g, ell) <= 1)
