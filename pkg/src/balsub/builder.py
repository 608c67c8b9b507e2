"""Assembly pipelines: greedy path collections between chosen cores, for the dense,
high-degree and bounded-degree regimes, plus the top-level dispatch.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field

from .adjuster import ConnectConfig, connect_exact_length_traced, find_path_of_length
from .connect import Expansion, PathFan, check_consecutive_shortest, grow_ball_avoiding, grow_expansion
from .errors import (BudgetExceeded, ExtractionFailed, Insufficient, ParityMismatch, PreconditionUnmet,
                     Unsatisfiable)
from .expander import extract_bipartite_expander
from .graph_core import Graph, Path, ball, bfs_distances, degree_stats, parity_class
from .verify import SubdivisionCertificate, make_certificate, pair_key, verify_subdivision

log = logging.getLogger(__name__)

PRESETS = ("desk", "theorem")


@dataclass
class BuildConfig:
    """Parameters of the pipelines; ``None`` means "take the preset value"."""

    epsilon1: float = 0.5
    epsilon2: float = 0.1
    ell: int | None = None
    target_k: int | None = None
    m: int | None = None
    r1: int | None = None
    r2: int | None = None
    s: float | None = None
    degree_threshold: int | None = None
    seed: int = 0
    max_steps: int = 3
    preset: str = "desk"
    c: float = 0.25
    t3: float = 0.05
    t4: float = 0.05
    expansion_D: int | None = None
    adjuster_range: int = 3
    adjuster_D: int = 2
    dfs_budget: int = 200_000

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"preset must be one of {PRESETS}")
        if self.ell is not None and self.ell < 1:
            raise ValueError("ell must be at least 1")
        if self.r1 is not None and self.r2 is not None and not self.r1 < self.r2:
            raise ValueError("r1 must be smaller than r2")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass
class BuildTrace:
    """Decisions taken by a pipeline, and for each parameter the formula value next to the value used."""

    branch: str = ""
    steps: list[str] = field(default_factory=list)
    params: dict[str, tuple[float | None, float]] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def step(self, msg: str) -> None:
        log.debug(msg)
        self.steps.append(msg)

    def param(self, name: str, formula, used) -> None:
        self.params[name] = (formula, used)

    def to_text(self) -> str:
        lines = [f"branch: {self.branch}"]
        for name, (formula, used) in self.params.items():
            f = "-" if formula is None else (f"{formula:.6g}" if isinstance(formula, float) else str(formula))
            lines.append(f"param {name} formula={f} used={used}")
        lines += [f"step {s}" for s in self.steps]
        lines += [f"diag {s}" for s in self.diagnostics]
        return "\n".join(lines) + "\n"


def _ln(n: int) -> float:
    return max(1.0, math.log(max(n, 2)))


class _Params:
    """Resolved parameter values for one graph under one preset, recorded in a trace."""

    def __init__(self, g: Graph, cfg: BuildConfig, trace: BuildTrace, regime: str, d: float | None = None):
        n = g.n
        stats = degree_stats(g)
        d = float(stats.average) if d is None else d
        delta = stats.minimum
        L = _ln(n)
        lnln = max(1.0, math.log(L)) if L > 1 else 1.0
        theorem = cfg.preset == "theorem"
        self.n, self.d, self.delta = n, d, delta

        def pick(name, formula, desk, given=None):
            used = given if given is not None else (formula if theorem else desk)
            trace.param(name, formula, used)
            return used

        s_formula = 20 / (1 - 2 * cfg.c)
        self.s = pick("s", s_formula, 1.0, cfg.s)
        ell_formula = 2 * math.ceil(L ** 7)
        ell_desk = 2 if regime == "dense" else 2 * math.ceil(L)
        self.ell = int(pick("ell", ell_formula, ell_desk, cfg.ell))
        self.m = int(pick("m", math.ceil(800 / cfg.epsilon1 * L ** 3), max(4, math.ceil(2 * L)), cfg.m))
        self.r1 = int(pick("r1", math.ceil(lnln ** 5), 1, cfg.r1))
        self.r2 = int(pick("r2", math.ceil(L / (300 * self.s * lnln)), 2, cfg.r2))
        if self.r2 <= self.r1:
            self.r2 = self.r1 + 1
            trace.step(f"r2 raised to {self.r2} to keep r1 < r2")
        self.threshold = int(pick("degree_threshold", cfg.c ** 2 * d ** 2 * L ** 10,
                                  max(1, math.ceil(cfg.c ** 2 * d ** 2 * L ** 2)), cfg.degree_threshold))
        if regime == "dense":
            k_formula = math.floor(math.sqrt(d) / (2 * L ** 10))
            k_desk = max(2, math.ceil(math.sqrt(2 * delta)))
        elif regime == "highdeg":
            k_formula = math.ceil(cfg.t3 * d)
            k_desk = max(2, delta + 1)
        else:
            k_formula = math.ceil(cfg.t4 * d)
            k_desk = max(2, delta + 1)
        self.target_k = int(pick("target_k", k_formula, k_desk, cfg.target_k))
        D_formula = d / L ** 10 if regime == "dense" else cfg.c ** 2 / 4 * d ** 2 * L ** 10
        self.D = int(pick("expansion_D", D_formula, 2, cfg.expansion_D))
        self.D = max(1, self.D)
        self.connect = ConnectConfig(adjuster_range=cfg.adjuster_range, adjuster_D=cfg.adjuster_D,
                                     m=self.m, dfs_budget=cfg.dfs_budget)


# --- core selection --------------------------------------------------------------------

def select_far_apart_cores(g: Graph, count: int, min_dist: int, same_side: bool = False) -> list[int]:
    """Greedy scattering: repeatedly take the smallest id at distance >= ``min_dist`` from all chosen.

    With ``same_side`` on a bipartite graph the greedy runs inside each side
    and the larger result is kept.  Vertices in other components count as far.
    Raises Insufficient (with the achieved list) when fewer than ``count`` are found.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    sides = g.sides if same_side else None
    if sides is None:
        pools = [list(range(g.n))]
    else:
        pools = [[v for v in range(g.n) if sides[v] == s] for s in (0, 1)]
    best: list[int] = []
    for pool in pools:
        chosen: list[int] = []
        near: set[int] = set()
        for v in pool:
            if len(chosen) >= count:
                break
            if v in near:
                continue
            chosen.append(v)
            if min_dist > 0:
                near.update(bfs_distances(g, [v], (), min_dist - 1))
        if len(chosen) > len(best):
            best = chosen
    if len(best) < count:
        raise Insufficient(f"only {len(best)} of {count} vertices are pairwise {min_dist} apart", best)
    return best


# --- shared greedy loop --------------------------------------------------------------

@dataclass
class _State:
    cores: list[int]
    paths: dict[tuple[int, int], Path] = field(default_factory=dict)
    successes: dict[int, int] = field(default_factory=dict)
    failures: dict[int, int] = field(default_factory=dict)

    def used(self) -> set[int]:
        out: set[int] = set()
        for p in self.paths.values():
            out.update(p)
        return out

    def drop(self, v: int) -> None:
        self.cores.remove(v)
        for key in [k for k in self.paths if v in k]:
            del self.paths[key]

    def missing(self) -> list[tuple[int, int]]:
        return [pair_key(u, v) for u, v in itertools.combinations(self.cores, 2)
                if pair_key(u, v) not in self.paths]


def _greedy_fill(g: Graph, state: _State, try_pair, trace: BuildTrace) -> None:
    """Fill missing pairs in order; when a pass leaves pairs open, drop the weakest core and go again."""
    while True:
        for u, v in state.missing():
            ok = try_pair(u, v)
            side = state.successes if ok else state.failures
            side[u] = side.get(u, 0) + 1
            side[v] = side.get(v, 0) + 1
        open_pairs = state.missing()
        if not open_pairs:
            return
        involved = {x for p in open_pairs for x in p}
        weakest = min(involved, key=lambda x: (sum(1 for k in state.paths if x in k),
                                               -state.failures.get(x, 0), -x))
        trace.step(f"dropping core {weakest}: {len(open_pairs)} pair(s) still open")
        state.drop(weakest)


def _finish(g: Graph, state: _State, ell: int, trace: BuildTrace) -> SubdivisionCertificate:
    cert = make_certificate(state.cores, state.paths.values(), ell)
    report = verify_subdivision(g, cert)
    if not report:
        raise AssertionError(f"builder produced an invalid certificate: {report}")
    trace.step(f"certificate k={cert.k} ell={ell}")
    return cert


def _expansions(g: Graph, u: int, v: int, D: int, m: int, avoid: set[int], tabu: set[int]
                ) -> tuple[Expansion, Expansion]:
    # F_u first, then F_v outside it; tabu holds members of earlier attempts
    fu = grow_expansion(g, u, D, m, avoid | tabu | {v})
    fv = grow_expansion(g, v, D, m, avoid | tabu | fu.members)
    return fu, fv


def _connect_pair(g: Graph, u: int, v: int, ell: int, avoid: set[int], D: int, m: int,
                  ccfg: ConnectConfig, max_steps: int, trace: BuildTrace, nbr_pool=None) -> Path | None:
    tabu: set[int] = set()
    for attempt in range(max_steps):
        try:
            if nbr_pool is None:
                fu, fv = _expansions(g, u, v, D, m, avoid, tabu)
            else:
                fu, fv = nbr_pool(u, v, avoid, tabu)
        except Insufficient as exc:
            trace.diagnostics.append(f"pair {u},{v} attempt {attempt}: expansions: {exc}")
            return None
        try:
            out = connect_exact_length_traced(g, fu, fv, ell, avoid, ccfg)
            return out.path
        except ParityMismatch as exc:
            trace.diagnostics.append(f"pair {u},{v}: ParityMismatch: {exc}")
            return None
        except Unsatisfiable as exc:
            trace.diagnostics.append(f"pair {u},{v} attempt {attempt}: {exc.stage}")
            if exc.stage in ("precondition", "direct-exhausted"):
                return None
        tabu |= (fu.members | fv.members) - {u, v}
    return None


def _same_side_cores(g: Graph, count: int, pool=None) -> list[int]:
    """Up to ``count`` vertices of one side of the largest component, smallest ids first."""
    sides = g.sides
    if g.n == 0:
        return []
    biggest = max(g.components(), key=len)
    cand = sorted(v for v in biggest if pool is None or v in pool)
    if sides is None:
        return cand[:count]
    by_side = [[v for v in cand if sides[v] == s] for s in (0, 1)]
    best = max(by_side, key=lambda c: (len(c), -c[0] if c else 0))
    return best[:count]


def _check_ell(g: Graph, cores: list[int], ell: int, trace: BuildTrace) -> list[int]:
    """Cores on one side need an even ell; with an odd ell keep at most two cores on opposite sides."""
    sides = g.sides
    if sides is None or ell % 2 == 0 or len(cores) <= 1:
        return cores
    trace.diagnostics.append(f"ParityMismatch: odd ell={ell} cannot join same-side cores")
    first = cores[0]
    other = [v for v in range(g.n) if sides[v] != sides[first] and g.component_ids[v] == g.component_ids[first]]
    return [first] + other[:1]


def build_dense(g: Graph, cfg: BuildConfig, trace: BuildTrace | None = None) -> SubdivisionCertificate:
    """Cores on one side, pairs joined greedily by exact-length paths avoiding everything used so far."""
    trace = trace if trace is not None else BuildTrace()
    p = _Params(g, cfg, trace, "dense")
    trace.step(f"dense: target_k={p.target_k} ell={p.ell}")
    if g.sides is None:
        raise ValueError("build_dense needs a bipartite graph")
    cores = _check_ell(g, _same_side_cores(g, p.target_k), p.ell, trace)
    state = _State(list(cores))

    def try_pair(u: int, v: int) -> bool:
        avoid = state.used() | set(state.cores)
        avoid -= {u, v}
        path = _connect_pair(g, u, v, p.ell, avoid, p.D, p.m, p.connect, cfg.max_steps, trace)
        if path is None:
            return False
        state.paths[pair_key(u, v)] = path
        return True

    _greedy_fill(g, state, try_pair, trace)
    return _finish(g, state, p.ell, trace)


def build_sparse_highdeg(g: Graph, cfg: BuildConfig, trace: BuildTrace | None = None) -> SubdivisionCertificate:
    """Like build_dense, with cores of degree at least the threshold and expansions taken from their neighbourhoods."""
    trace = trace if trace is not None else BuildTrace()
    p = _Params(g, cfg, trace, "highdeg")
    if g.sides is None:
        raise ValueError("build_sparse_highdeg needs a bipartite graph")
    high = {v for v in range(g.n) if len(g.adj[v]) >= p.threshold}
    sides = g.sides
    supply = max((sum(1 for v in high if sides[v] == s) for s in (0, 1)), default=0)
    trace.step(f"highdeg: {len(high)} vertices of degree >= {p.threshold}, {supply} on the fuller side")
    if supply < p.target_k:
        raise PreconditionUnmet(f"{supply} high-degree vertices on one side, {p.target_k} needed", supply)
    cores = _check_ell(g, _same_side_cores(g, p.target_k, high), p.ell, trace)
    state = _State(list(cores))
    size = max(1, min(p.D, p.threshold))

    def nbr_pool(u: int, v: int, avoid: set[int], tabu: set[int]) -> tuple[Expansion, Expansion]:
        fu = [w for w in g.adj[u] if w not in avoid and w not in tabu and w != v][: size - 1]
        fv = [w for w in g.adj[v] if w not in avoid and w not in tabu and w != u and w not in fu][: size - 1]
        if len(fu) < size - 1 or len(fv) < size - 1:
            raise Insufficient("neighbourhood too small for the expansion size", min(len(fu), len(fv)) + 1)
        return (Expansion(u, frozenset([u, *fu]), 1), Expansion(v, frozenset([v, *fv]), 1))

    def try_pair(u: int, v: int) -> bool:
        avoid = (state.used() | set(state.cores)) - {u, v}
        path = _connect_pair(g, u, v, p.ell, avoid, p.D, p.m, p.connect, cfg.max_steps, trace, nbr_pool)
        if path is None:
            return False
        state.paths[pair_key(u, v)] = path
        return True

    _greedy_fill(g, state, try_pair, trace)
    return _finish(g, state, p.ell, trace)


# --- bounded degree -----------------------------------------------------------------

def _pick_bounded_cores(g: Graph, count: int, min_dist: int, ell: int, trace: BuildTrace) -> list[int]:
    odd = g.sides is not None and ell % 2 == 1
    if odd and count > 2:
        trace.diagnostics.append(f"ParityMismatch: odd ell={ell} allows at most two cores")
        count = 2
    dist = min_dist
    while True:
        try:
            if odd and count == 2:
                cores = _opposite_pair(g, dist, ell)
            else:
                cores = select_far_apart_cores(g, count, dist, same_side=True)
        except Insufficient:
            cores = None
        if cores is not None:
            break
        if dist == 0:
            cores = select_far_apart_cores(g, 0, 0) or _same_side_cores(g, count)
            break
        dist -= 1
        if dist + 1 == min_dist:
            warnings.warn(f"cores cannot be {min_dist} apart; relaxing the distance", stacklevel=3)
    if dist != min_dist:
        trace.step(f"core distance relaxed from {min_dist} to {dist}")
    return cores


def _opposite_pair(g: Graph, min_dist: int, ell: int) -> list[int]:
    sides = g.sides
    for u in range(min(g.n, 64)):
        dist = bfs_distances(g, [u], (), ell)
        for v in sorted(dist):
            if sides[v] != sides[u] and min_dist <= dist[v] <= ell:
                return [u, v]
    raise Insufficient("no opposite-side pair within reach", [])


def _ball_clause_ok(g: Graph, fans: dict[int, PathFan], r1: int, all_vertices: set[int]) -> bool:
    """For every core q: the vertices of the family outside q's own prefixes miss the
    radius-r1 ball around q in the graph minus those prefixes (q kept)."""
    for q, fan in fans.items():
        own = fan.vertices() - {q}
        reach = ball(g, [q], r1, own)
        if (all_vertices - fan.vertices() - {q}) & reach:
            return False
    return True


def build_sparse_bounded(g: Graph, cfg: BuildConfig, trace: BuildTrace | None = None) -> SubdivisionCertificate:
    """Far-apart cores with private inner balls.

    Each path leaves its cores along a shortest path of length r1 inside the
    core's inner ball (extending that core's fan of consecutive shortest
    paths), and its middle section is routed at length ell - 2*r1 outside all
    inner balls.  A commit is rejected unless the fans stay consecutive-shortest,
    the path misses every other core's ball, and the ball clause holds.
    """
    trace = trace if trace is not None else BuildTrace()
    p = _Params(g, cfg, trace, "bounded")
    if g.sides is None:
        raise ValueError("build_sparse_bounded needs a bipartite graph")
    r1 = max(0, min(p.r1, (p.ell - 2) // 2))
    if r1 != p.r1:
        trace.step(f"r1 lowered to {r1} so that ell={p.ell} leaves a middle section")
    cores = _pick_bounded_cores(g, p.target_k, 3 * p.r2 + 1, p.ell, trace)
    trace.step(f"bounded: cores {cores} ell={p.ell} r1={r1} r2={p.r2}")
    inner = {v: frozenset(ball(g, [v], r1)) for v in cores}
    state = _State(list(cores))
    fans: dict[int, PathFan] = {v: PathFan(v, inner[v]) for v in cores}
    order: list[tuple[int, int]] = []

    def rebuild_fans() -> None:
        for v in list(fans):
            if v not in state.cores:
                del fans[v]
        for v in fans:
            fans[v].paths = []
        for key in order:
            if key not in state.paths:
                continue
            path = state.paths[key]
            fans[path[0]].paths.append(path[: r1 + 1])
            fans[path[-1]].paths.append(tuple(reversed(path[-r1 - 1:])))

    def try_pair(u: int, v: int) -> bool:
        rebuild_fans()
        used = state.used()
        others = set()
        for q in state.cores:
            if q not in (u, v):
                others |= inner[q]
        blocked_u = (used - {u}) | others
        blocked_v = (used - {v}) | others
        bu = bfs_distances(g, [u], blocked_u | {v}, r1)
        bv = bfs_distances(g, [v], blocked_v | {u}, r1)
        grow = grow_ball_avoiding(g, [u], blocked_u | {v}, r1 + p.r2, p.D)
        if not grow.met:
            trace.diagnostics.append(f"pair {u},{v}: outer ball around {u} has {len(grow.members)} < {p.D} vertices")
        ends_u = sorted(x for x, dx in bu.items() if dx == r1)
        ends_v = sorted(x for x, dx in bv.items() if dx == r1)
        tries = 0
        for eu, ev in itertools.product(ends_u, ends_v):
            if tries >= cfg.max_steps * 4:
                break
            if eu == ev or eu in bv or ev in bu:
                continue
            tries += 1
            lu = _bfs_path(bu, g, u, eu)
            lv = _bfs_path(bv, g, v, ev)
            avoid = used | others | (set(bu) - {eu}) | (set(bv) - {ev})
            avoid -= {eu, ev}
            if r1 == 0:
                avoid = (used | others | set(state.cores)) - {u, v}
            mid = _connect_pair(g, eu, ev, p.ell - 2 * r1, avoid, p.D, p.m, p.connect, 1, trace)
            if mid is None:
                continue
            path = lu + mid[1:] + tuple(reversed(lv))[1:]
            if len(set(path)) != len(path):
                continue
            key = pair_key(u, v)
            state.paths[key] = path if path[0] == key[0] else tuple(reversed(path))
            order.append(key)
            rebuild_fans()
            all_vertices = state.used()
            ok = all(check_consecutive_shortest(g, fans[q]) for q in (u, v))
            ok = ok and not (set(path) & others)
            ok = ok and _ball_clause_ok(g, fans, r1, all_vertices)
            if ok:
                return True
            trace.diagnostics.append(f"pair {u},{v}: commit rejected by the fan or ball clauses")
            del state.paths[key]
            order.remove(key)
        return False

    _greedy_fill(g, state, try_pair, trace)
    return _finish(g, state, p.ell, trace)


def _bfs_path(dist: dict[int, int], g: Graph, root: int, end: int) -> Path:
    """Walk back from ``end`` to ``root`` along decreasing BFS distance, smallest ids first."""
    out = [end]
    cur = end
    while cur != root:
        cur = min(w for w in g.adj[cur] if dist.get(w) == dist[cur] - 1)
        out.append(cur)
    return tuple(reversed(out))


# --- sparse dispatch and top level ------------------------------------------------------

@dataclass
class StripResult:
    subgraph: Graph
    removed: frozenset[int]
    origin: tuple[int, ...]
    min_degree: int
    claim_holds: bool | None    # min degree > d/3, when d was given


def strip_high_degree(g: Graph, threshold: int, d: float | None = None) -> StripResult:
    """Delete every vertex of degree >= ``threshold``; isolated survivors are kept."""
    removed = frozenset(v for v in range(g.n) if len(g.adj[v]) >= threshold)
    sub, origin = g.induced_subgraph(v for v in range(g.n) if v not in removed)
    assert all(len(g.adj[o]) < threshold for o in origin)
    mind = min((len(a) for a in sub.adj), default=0)
    claim = None if d is None else 3 * mind > d
    return StripResult(sub, removed, origin, mind, claim)


@dataclass
class AutoResult:
    cert: SubdivisionCertificate
    trace: BuildTrace


def trivial_certificate(g: Graph, ell: int, budget: int = 20_000, tries: int = 64) -> SubdivisionCertificate:
    """Two cores joined by one path of length ``ell`` if a quick search finds one, else a single core."""
    if g.n == 0:
        return SubdivisionCertificate((), {}, ell)
    sides = g.sides
    for u in range(min(g.n, tries)):
        if not g.adj[u]:
            continue
        dist = bfs_distances(g, [u], (), ell)
        for v in sorted(dist):
            if v == u:
                continue
            if sides is not None and parity_class(sides, u, v) % 2 != ell % 2:
                continue
            try:
                p = find_path_of_length(g, u, v, ell, (), budget)
            except BudgetExceeded:
                continue
            if p is not None:
                return make_certificate((u, v), [p], ell)
            break
    return SubdivisionCertificate((0,), {}, ell)


def _lift(cert: SubdivisionCertificate, origin) -> SubdivisionCertificate:
    return cert.relabel(origin)


def build_auto(g: Graph, cfg: BuildConfig | None = None) -> AutoResult:
    """Extract a bipartite expander, pick the regime by its minimum degree, build, and map back.

    Never raises on ordinary inputs: every failure is recorded in the trace
    and the result falls back to the trivial certificate with k <= 2.
    """
    cfg = cfg or BuildConfig()
    trace = BuildTrace()
    stats = degree_stats(g)
    d = float(stats.average)
    trace.step(f"input n={g.n} m={g.m} d={d:.4g}")
    fallback_ell = cfg.ell if cfg.ell is not None else 2
    if g.m == 0:
        trace.branch = "trivial"
        cert = SubdivisionCertificate((0,) if g.n else (), {}, fallback_ell)
        return AutoResult(cert, trace)

    d0 = d / 8
    h = origin = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for dd in (max(1.0, d0), 1.0):
            try:
                res = extract_bipartite_expander(g, dd, cfg.epsilon2, cfg.epsilon1, seed=cfg.seed)
            except ExtractionFailed as exc:
                trace.diagnostics.append(f"extraction with d={dd:.4g} failed: {exc}")
                continue
            h, origin = res.subgraph, res.origin
            trace.param("d0", d0, dd)
            trace.step(f"expander: n={h.n} min degree {res.min_degree}, check {res.report.mode} "
                       f"holds={res.report.holds}")
            break
    cert = None
    if h is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")   # relaxations are recorded in the trace
            cert = _dispatch(h, cfg, trace)
        if cert is not None:
            cert = _lift(cert, origin)
    if cert is None or cert.k < 2:
        ell = cert.ell if cert is not None else fallback_ell
        triv = trivial_certificate(g, ell)
        if cert is None or triv.k > cert.k:
            trace.step(f"fallback to trivial certificate k={triv.k}")
            trace.branch = trace.branch or "trivial"
            cert = triv
    report = verify_subdivision(g, cert)
    if not report:
        raise AssertionError(f"build_auto produced an invalid certificate: {report}")
    return AutoResult(cert, trace)


def _dispatch(h: Graph, cfg: BuildConfig, trace: BuildTrace) -> SubdivisionCertificate | None:
    stats = degree_stats(h)
    delta = stats.minimum
    d = float(stats.average)
    s = cfg.s if cfg.s is not None else (20 / (1 - 2 * cfg.c) if cfg.preset == "theorem" else 1.0)
    bar = math.log(max(h.n, 2)) ** s
    trace.param("dense_bar", math.log(max(h.n, 2)) ** (20 / (1 - 2 * cfg.c)), bar)
    if cfg.ell is not None and cfg.ell % 2 == 1 and (cfg.target_k is None or cfg.target_k > 2):
        trace.diagnostics.append(f"ParityMismatch: ell={cfg.ell} is odd, so same-side cores are impossible")
        trace.branch = "parity-fallback"
        return None
    try:
        if delta >= bar:
            trace.branch = "dense"
            trace.step(f"dispatch: min degree {delta} >= ln(n)^s = {bar:.4g}: dense")
            return build_dense(h, cfg, trace)
        p = _Params(h, cfg, BuildTrace(), "highdeg")
        high = sum(1 for v in range(h.n) if len(h.adj[v]) >= p.threshold)
        need = 2 * cfg.t3 * d
        trace.step(f"dispatch: min degree {delta} < {bar:.4g}; {high} vertices of degree >= {p.threshold}, "
                   f"need {need:.4g}")
        if high >= need and high > 0:
            try:
                trace.branch = "highdeg"
                return build_sparse_highdeg(h, cfg, trace)
            except PreconditionUnmet as exc:
                trace.diagnostics.append(f"highdeg precondition unmet (supply {exc.supply}); using bounded")
                return _bounded_after_strip(h, cfg, trace, None, d)
        return _bounded_after_strip(h, cfg, trace, p.threshold, d)
    except (ValueError, Unsatisfiable) as exc:
        trace.diagnostics.append(f"builder failed: {exc}")
        return None


def _bounded_after_strip(h: Graph, cfg: BuildConfig, trace: BuildTrace, threshold: int | None,
                         d: float) -> SubdivisionCertificate:
    trace.branch = "bounded"
    origin: tuple[int, ...] = tuple(range(h.n))
    work = h
    if threshold is not None:
        st = strip_high_degree(h, threshold, d)
        trace.step(f"strip: removed {len(st.removed)} vertices of degree >= {threshold}; "
                   f"min degree {st.min_degree}, claim min degree > d/3: {st.claim_holds}")
        work, origin = st.subgraph, st.origin
    comps = work.components()
    if len(comps) > 1:
        big = max(comps, key=len)
        work, sub_origin = work.induced_subgraph(big)
        origin = tuple(origin[i] for i in sub_origin)
        trace.step(f"bounded: kept the largest component ({len(big)} vertices)")
    cert = build_sparse_bounded(work, cfg, trace)
    return cert.relabel(origin)
