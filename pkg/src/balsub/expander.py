"""Sublinear expansion: the expansion function, expansion checks, and expander extraction."""

from __future__ import annotations

import logging
import math
import random
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import ExtractionFailed
from .graph_core import Graph, average_degree, bfs_distances

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpanderParams:
    epsilon1: float
    k: float
    epsilon2: float = 0.1

    def __post_init__(self):
        if not 0 < self.epsilon1 < 1:
            raise ValueError("epsilon1 must lie in (0, 1)")
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not 0 < self.epsilon2 < 1:
            raise ValueError("epsilon2 must lie in (0, 1)")


def epsilon(x: float, params: ExpanderParams) -> float:
    """Required expansion rate for sets of size ``x``: 0 below k/5, else eps1 / ln^2(15x/k)."""
    if x < 0:
        raise ValueError("x must be non-negative")
    if x < params.k / 5:
        return 0.0
    return params.epsilon1 / math.log(15 * x / params.k) ** 2


@dataclass(frozen=True)
class ExpansionBudget:
    exhaustive_cap: int = 20    # n at or below this: every subset is checked
    size_cap: int = 10          # largest connected subset enumerated above the cap
    max_subsets: int = 200_000
    samples: int = 400          # random subsets in sampled mode
    ball_roots: int = 32        # BFS roots whose balls and layers are checked


@dataclass(frozen=True)
class ExpansionReport:
    mode: str
    holds: bool
    witness: frozenset[int] | None
    subsets_checked: int


def in_range(size: int, n: int, params: ExpanderParams) -> bool:
    return size >= 1 and params.k / 2 <= size <= n / 2


def violates(g: Graph, x: Iterable[int], params: ExpanderParams) -> bool:
    """True iff ``x`` is in the checked size range and expands too little."""
    xs = set(x)
    if not in_range(len(xs), g.n, params):
        return False
    boundary = set()
    for v in xs:
        boundary.update(g.adj[v])
    boundary -= xs
    return len(boundary) < epsilon(len(xs), params) * len(xs)


def verify_expander(g: Graph, params: ExpanderParams, budget: ExpansionBudget | None = None,
                    mode: str | None = None, seed: int = 0) -> ExpansionReport:
    """Check ``|N(X)| >= eps(|X|)|X|`` for all ``k/2 <= |X| <= n/2``.

    ``mode="exact"`` is exhaustive for ``n <= budget.exhaustive_cap`` and
    enumerates every connected subset up to ``budget.size_cap`` beyond that.
    ``mode="sampled"`` checks components, balls, BFS layers and random
    subsets; a sampled pass that finds nothing is evidence, not proof.
    """
    budget = budget or ExpansionBudget()
    if mode is None:
        mode = "exact" if g.n <= budget.exhaustive_cap else "sampled"
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact" and g.n <= budget.exhaustive_cap:
        return _exhaustive(g, params)
    if mode == "exact":
        report = _connected_enumeration(g, params, budget)
        if report is not None:
            return report
        log.info("connected-subset enumeration exceeded budget; falling back to sampling")
    return _sampled(g, params, budget, seed)


def _popcount(a: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a).astype(np.int64)
    table = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    for shift in range(0, 32, 8):
        out += table[(a >> shift) & 0xFF]
    return out


def _exhaustive(g: Graph, params: ExpanderParams) -> ExpansionReport:
    n = g.n
    if n == 0:
        return ExpansionReport("exact", True, None, 0)
    total = 1 << n
    masks = np.arange(total, dtype=np.int64)
    union = np.zeros(total, dtype=np.int64)
    size = np.zeros(total, dtype=np.int64)
    for i in range(n):
        nb = 0
        for u in g.adj[i]:
            nb |= 1 << u
        lo, hi = 1 << i, 1 << (i + 1)
        union[lo:hi] = union[:lo] | nb
        size[lo:hi] = size[:lo] + 1
    boundary = _popcount(union & ~masks)
    eps = np.array([epsilon(s, params) * s if s else 0.0 for s in range(n + 1)])
    eligible = (size >= 1) & (size >= params.k / 2) & (2 * size <= n)
    bad = eligible & (boundary < eps[size])
    checked = int(eligible.sum())
    if not bad.any():
        return ExpansionReport("exact", True, None, checked)
    idx = np.flatnonzero(bad)
    order = np.lexsort((idx, size[idx], boundary[idx]))
    best = int(idx[order[0]])
    witness = frozenset(i for i in range(n) if best >> i & 1)
    return ExpansionReport("exact", False, witness, checked)


def _connected_subsets(g: Graph, cap: int) -> Iterator[frozenset[int]]:
    """Each connected vertex set of size <= cap exactly once (ESU enumeration)."""
    adj = g.adj

    def extend(sub: frozenset[int], closed: frozenset[int], ext: list[int], root: int):
        yield sub
        if len(sub) == cap:
            return
        ext = sorted(ext)
        while ext:
            w = ext.pop(0)
            fresh = [u for u in adj[w] if u > root and u not in closed]
            yield from extend(sub | {w}, closed | set(adj[w]) | {w}, ext + fresh, root)

    for v in range(g.n):
        yield from extend(frozenset([v]), frozenset(adj[v]) | {v}, [u for u in adj[v] if u > v], v)


def _connected_enumeration(g: Graph, params: ExpanderParams, budget: ExpansionBudget) -> ExpansionReport | None:
    checked = 0
    seen = 0
    best = None
    for x in _connected_subsets(g, budget.size_cap):
        seen += 1
        if seen > budget.max_subsets:
            return None
        if not in_range(len(x), g.n, params):
            continue
        checked += 1
        if violates(g, x, params):
            key = (_boundary_size(g, x), len(x), sorted(x))
            if best is None or key < best[0]:
                best = (key, x)
    for x in _components(g):
        checked += 1
        if violates(g, x, params):
            key = (_boundary_size(g, x), len(x), sorted(x))
            if best is None or key < best[0]:
                best = (key, x)
    if best is None:
        return ExpansionReport("exact", True, None, checked)
    return ExpansionReport("exact", False, best[1], checked)


def _boundary_size(g: Graph, x) -> int:
    out = set()
    for v in x:
        out.update(g.adj[v])
    return len(out - set(x))


def _components(g: Graph) -> list[frozenset[int]]:
    return [frozenset(c) for c in g.components()]


def _structured_candidates(g: Graph, budget: ExpansionBudget, rng: random.Random) -> Iterator[frozenset[int]]:
    yield from _components(g)
    roots = list(range(g.n))
    if len(roots) > budget.ball_roots:
        roots = sorted(rng.sample(roots, budget.ball_roots))
    half = g.n / 2
    for r in roots:
        dist = bfs_distances(g, [r])
        layers: dict[int, list[int]] = {}
        for v, d in dist.items():
            layers.setdefault(d, []).append(v)
        acc: set[int] = set()
        for d in sorted(layers):
            layer = frozenset(layers[d])
            acc |= layer
            if len(acc) > half:
                break
            yield frozenset(acc)
            if d > 0:
                yield layer


def _random_candidates(g: Graph, budget: ExpansionBudget, params: ExpanderParams,
                       rng: random.Random) -> Iterator[frozenset[int]]:
    lo = max(1, math.ceil(params.k / 2))
    hi = g.n // 2
    if hi < lo:
        return
    for i in range(budget.samples):
        size = rng.randint(lo, hi)
        if i % 2:
            yield frozenset(rng.sample(range(g.n), size))
            continue
        # random connected growth
        start = rng.randrange(g.n)
        grown = {start}
        frontier = list(g.adj[start])
        seen = {start, *frontier}
        while len(grown) < size and frontier:
            j = rng.randrange(len(frontier))
            frontier[j], frontier[-1] = frontier[-1], frontier[j]
            w = frontier.pop()
            grown.add(w)
            for u in g.adj[w]:
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        yield frozenset(grown)


def _sampled(g: Graph, params: ExpanderParams, budget: ExpansionBudget, seed: int) -> ExpansionReport:
    rng = random.Random(seed)
    checked = 0
    best = None
    for source in (_structured_candidates(g, budget, rng), _random_candidates(g, budget, params, rng)):
        for x in source:
            if not in_range(len(x), g.n, params):
                continue
            checked += 1
            if violates(g, x, params):
                key = (_boundary_size(g, x), len(x), sorted(x))
                if best is None or key < best[0]:
                    best = (key, x)
        if best is not None:
            break
    if best is None:
        return ExpansionReport("sampled", True, None, checked)
    return ExpansionReport("sampled", False, best[1], checked)


# --- extraction --------------------------------------------------------------------

@dataclass
class ExpanderResult:
    subgraph: Graph
    origin: tuple[int, ...]          # origin[i] = id in the input graph
    params: ExpanderParams
    report: ExpansionReport
    iterations: int = 0
    notes: list[str] = field(default_factory=list)


def _prune(g: Graph, keep: set[int]) -> set[int]:
    """Delete vertices of degree below half the current average until none remain.

    Each deletion removes at most average/2 edges, so the average never drops.
    """
    keep = set(keep)
    deg = {v: sum(1 for u in g.adj[v] if u in keep) for v in keep}
    edges2 = sum(deg.values())
    changed = True
    while changed and keep:
        changed = False
        for v in sorted(keep):
            if v not in keep:
                continue
            if 2 * deg[v] * len(keep) < edges2:  # deg < avg/2
                keep.discard(v)
                edges2 -= 2 * deg[v]
                for u in g.adj[v]:
                    if u in keep:
                        deg[u] -= 1
                del deg[v]
                changed = True
    return keep


def _avg(g: Graph, vertices: set[int]) -> float:
    if not vertices:
        return 0.0
    twice = sum(1 for v in vertices for u in g.adj[v] if u in vertices)
    return twice / len(vertices)


def _densest_component(g: Graph, vertices: set[int]) -> set[int]:
    sub, origin = g.induced_subgraph(vertices)
    comps = sub.components()
    if len(comps) <= 1:
        return set(vertices)
    best = max(comps, key=lambda c: (_avg(sub, set(c)), -c[0]))
    return {origin[i] for i in best}


def _settle(g: Graph, vertices: set[int]) -> set[int]:
    """Prune and keep the densest component until both are stable."""
    current = set(vertices)
    while True:
        nxt = _densest_component(g, _prune(g, current))
        if nxt == current:
            return current
        current = nxt


def extract_expander(g: Graph, epsilon2: float = 0.1, epsilon1: float = 0.5, *, k: float | None = None,
                     mode: str | None = None, seed: int = 0, budget: ExpansionBudget | None = None,
                     max_iterations: int | None = None) -> ExpanderResult:
    """Find a connected subgraph H with d(H) >= d(g)/2, min degree >= d(H)/2, and no
    expansion violation the checker can find.

    Loop: prune low-degree vertices, check expansion, and on a violating set X
    move to whichever of G[X] and G - X is denser.  A split that would take the
    average degree under d(g)/2 is refused and the current subgraph returned.
    """
    d0 = average_degree(g)
    if d0 <= 0:
        raise ValueError("extract_expander needs a graph with at least one edge")
    params = ExpanderParams(epsilon1, k if k is not None else epsilon2 * d0, epsilon2)
    budget = budget or ExpansionBudget()
    limit = max_iterations if max_iterations is not None else 4 * g.n
    notes: list[str] = []
    current = _settle(g, set(range(g.n)))
    report = None
    checked_set = None
    it = 0
    while it < limit:
        it += 1
        sub, origin = g.induced_subgraph(current)
        report = verify_expander(sub, params, budget, mode, seed + it)
        checked_set = current
        if report.holds:
            break
        x = {origin[i] for i in report.witness}
        sides = [_settle(g, x), _settle(g, current - x)]
        sides = [s for s in sides if s]
        choice = max(sides, key=lambda s: (_avg(g, s), -min(s)))
        if _avg(g, choice) < d0 / 2:
            notes.append(f"iteration {it}: split would drop average degree below d(G)/2; stopped")
            break
        current = choice
    else:
        notes.append("iteration budget exhausted")
    sub, origin = g.induced_subgraph(current)
    if checked_set != current:
        report = verify_expander(sub, params, budget, mode, seed)
    return ExpanderResult(sub, origin, params, report, it, notes)


def check_degree_guarantees(g: Graph, h: Graph) -> bool:
    """d(H) >= d(G)/2 and delta(H) >= d(H)/2, compared exactly in integers."""
    if h.n == 0:
        return False
    min_deg = min(len(r) for r in h.adj)
    # 2m_H/n_H >= m_G/n_G  and  min_deg >= m_H/n_H
    return 2 * h.m * g.n >= g.m * h.n and min_deg * h.n >= h.m


# --- bipartite variant -------------------------------------------------------------

def max_cut_sides(g: Graph) -> list[int]:
    """Deterministic greedy + single-flip local search 2-colouring.

    At a local optimum each vertex has at least half its edges crossing, so
    the crossing edges form a bipartite subgraph with at least m/2 edges.
    """
    side = [0] * g.n
    placed = [False] * g.n
    for v in range(g.n):
        count = [0, 0]
        for u in g.adj[v]:
            if placed[u]:
                count[side[u]] += 1
        side[v] = 1 if count[0] > count[1] else 0
        placed[v] = True
    improved = True
    while improved:
        improved = False
        for v in range(g.n):
            same = sum(1 for u in g.adj[v] if side[u] == side[v])
            if 2 * same > len(g.adj[v]):
                side[v] ^= 1
                improved = True
    return side


@dataclass
class BipartiteExpanderResult:
    subgraph: Graph
    origin: tuple[int, ...]
    params: ExpanderParams
    report: ExpansionReport
    min_degree: int
    notes: list[str] = field(default_factory=list)


def _min_degree_core(g: Graph, vertices: set[int], d: float) -> set[int]:
    keep = set(vertices)
    deg = {v: sum(1 for u in g.adj[v] if u in keep) for v in keep}
    stack = [v for v in keep if deg[v] < d]
    while stack:
        v = stack.pop()
        if v not in keep:
            continue
        keep.discard(v)
        for u in g.adj[v]:
            if u in keep:
                deg[u] -= 1
                if deg[u] < d and deg[u] + 1 >= d:
                    stack.append(u)
    return keep


def extract_bipartite_expander(g: Graph, d: float, epsilon2: float = 0.1, epsilon1: float = 0.5, *,
                               mode: str | None = None, seed: int = 0, budget: ExpansionBudget | None = None,
                               strict: bool = False) -> BipartiteExpanderResult:
    """Bipartite subgraph with min degree >= d that passes the expansion check for k = epsilon2*d."""
    dg = average_degree(g)
    if dg < 8 * d:
        msg = f"average degree {dg:.3g} is below 8d = {8 * d:.3g}"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg + "; running in desk mode" + ("" if dg >= 2 * d else " (below 2d as well)"),
                      stacklevel=2)
    if g.m == 0:
        raise ExtractionFailed("graph has no edges", {"average_degree": 0.0})
    sides = max_cut_sides(g)
    b = g.edge_subgraph(lambda u, v: sides[u] != sides[v])
    k = epsilon2 * d
    notes: list[str] = [f"max-cut kept {b.m} of {g.m} edges"]

    def finish(vertices: set[int]) -> set[int]:
        core = _min_degree_core(b, vertices, d)
        if not core:
            return core
        return _densest_component(b, core)

    chosen: set[int] = set()
    first = extract_expander(b, epsilon2, epsilon1, k=k, mode=mode, seed=seed, budget=budget)
    chosen = finish(set(first.origin))
    if not chosen:
        notes.append("expander piece lost min degree d; retrying from the d-core of the bipartite subgraph")
        core = finish(set(range(b.n)))
        if core:
            piece, origin = b.induced_subgraph(core)
            second = extract_expander(piece, epsilon2, epsilon1, k=k, mode=mode, seed=seed, budget=budget)
            chosen = finish({origin[i] for i in second.origin})
    if not chosen:
        raise ExtractionFailed(
            f"no bipartite subgraph with minimum degree >= {d} found",
            {"average_degree": dg, "bipartite_edges": b.m, "max_degree": max((len(r) for r in b.adj), default=0)},
        )
    sub, origin = b.induced_subgraph(chosen)
    params = ExpanderParams(epsilon1, k, epsilon2)
    report = verify_expander(sub, params, budget, mode, seed)
    return BipartiteExpanderResult(sub, origin, params, report, min(len(r) for r in sub.adj), notes)
