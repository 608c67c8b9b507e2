"""Adjusters: gadgets carrying paths of lengths l, l+2, ..., l+2k between two fixed vertices,
and the exact-length connection built on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable

from .connect import Expansion, connect_avoiding, grow_expansion
from .errors import (BudgetExceeded, ChainError, Insufficient, InsufficientExpansion, NoCycle, NoPath,
                     ParityMismatch, TooLong, Unsatisfiable)
from .graph_core import Graph, Path, as_blocked, ball, bfs_distances, is_path, parity_class, shortest_cycle, shortest_path


@dataclass(frozen=True)
class Adjuster:
    v1: int
    f1: Expansion
    v2: int
    f2: Expansion
    a: frozenset[int]
    k: int
    base_length: int
    paths: tuple[Path, ...]   # paths[i] runs v1 -> v2 with length base_length + 2i

    def vertices(self) -> frozenset[int]:
        return self.f1.members | self.f2.members | self.a

    def reversed(self) -> "Adjuster":
        return Adjuster(self.v2, self.f2, self.v1, self.f1, self.a, self.k, self.base_length,
                        tuple(tuple(reversed(p)) for p in self.paths))

    def lengths(self) -> list[int]:
        return [len(p) - 1 for p in self.paths]


def adjuster_violations(g: Graph, adj: Adjuster, D: int, m: int) -> list[str]:
    """Every clause of the adjuster definition that fails, as short messages."""
    out: list[str] = []
    f1, f2, a = adj.f1.members, adj.f2.members, adj.a
    if a & f1 or a & f2 or f1 & f2:
        out.append("A1: A, F1, F2 not pairwise disjoint")
    for name, root, f in (("F1", adj.v1, adj.f1), ("F2", adj.v2, adj.f2)):
        if f.root != root or root not in f.members:
            out.append(f"A2: {name} not rooted at its vertex")
            continue
        if f.size != D:
            out.append(f"A2: |{name}| = {f.size} != D = {D}")
        depth = f.depths(g)
        if len(depth) != f.size:
            out.append(f"A2: {name} not connected")
        elif max(depth.values()) > m:
            out.append(f"A2: {name} radius {max(depth.values())} > m = {m}")
    if len(a) > 10 * m * adj.k:
        out.append(f"A3: |A| = {len(a)} > 10mk = {10 * m * adj.k}")
    if len(adj.paths) != adj.k + 1:
        out.append(f"A4: {len(adj.paths)} paths for range {adj.k}")
    allowed = a | {adj.v1, adj.v2}
    for i, p in enumerate(adj.paths):
        if not p or p[0] != adj.v1 or p[-1] != adj.v2:
            out.append(f"A4: path {i} has wrong endpoints")
        elif not is_path(g, p):
            out.append(f"A4: path {i} is not a simple path of g")
        elif not set(p) <= allowed:
            out.append(f"A4: path {i} leaves A + {{v1, v2}}")
        elif len(p) - 1 != adj.base_length + 2 * i:
            out.append(f"A4: path {i} has length {len(p) - 1}, expected {adj.base_length + 2 * i}")
    if adj.base_length > len(a) + 1:
        out.append("base length exceeds |A| + 1")
    return out


def verify_adjuster(g: Graph, adj: Adjuster, D: int, m: int) -> bool:
    return not adjuster_violations(g, adj, D, m)


def base_is_minimal(g: Graph, adj: Adjuster, cap: int = 16) -> bool | None:
    """False if a v1,v2-path of length base-2 exists inside A + {v1, v2}; None when |A| > cap."""
    if len(adj.a) > cap:
        return None
    if adj.base_length < 2:
        return True
    inside = adj.a | {adj.v1, adj.v2}
    outside = {v for v in range(g.n) if v not in inside}
    try:
        p = find_path_of_length(g, adj.v1, adj.v2, adj.base_length - 2, outside, budget=None)
    except BudgetExceeded:  # pragma: no cover - no budget given
        return None
    return p is None


def _check_parity(g: Graph, adj: Adjuster) -> None:
    sides = g.sides
    if sides is not None and adj.base_length % 2 != parity_class(sides, adj.v1, adj.v2) % 2:
        raise AssertionError("adjuster base length has the wrong parity for its endpoints")


# --- construction ------------------------------------------------------------------

def build_simple_adjuster(g: Graph, D: int, max_m: int, avoid: Iterable[int] = (), *,
                          region: Iterable[int] | None = None, max_cycles: int = 8) -> Adjuster:
    """Range-1 adjuster from a shortest even cycle of ``g - avoid``.

    With the cycle of length 2*l0, two vertices at distance l0-1 along it split
    it into arcs of lengths l0-1 and l0+1; the other cycle vertices form A and
    each endpoint grows a D-vertex expansion away from the cycle.  When no
    expansion fits, the next shortest cycle (with earlier cycles deleted) is
    tried, up to ``max_cycles`` cycles.
    """
    if g.sides is None:
        raise ValueError("build_simple_adjuster needs a bipartite graph")
    blocked = set(avoid)
    region = None if region is None else set(region)
    tried = 0
    while tried < max_cycles:
        cycle = shortest_cycle(g, blocked, region)
        if cycle is None:
            if tried == 0:
                raise NoCycle("no cycle left once avoid is deleted")
            break
        tried += 1
        length = len(cycle)
        l0 = length // 2
        on_cycle = set(cycle)
        for s in range(length):
            x1 = cycle[s]
            x2 = cycle[(s + l0 - 1) % length]
            try:
                f1 = grow_expansion(g, x1, D, max_m, blocked | (on_cycle - {x1}))
                f2 = grow_expansion(g, x2, D, max_m, blocked | (on_cycle - {x2}) | f1.members)
            except Insufficient:
                continue
            short = tuple(cycle[(s + j) % length] for j in range(l0))
            long = tuple(cycle[(s - j) % length] for j in range(l0 + 2))
            adj = Adjuster(x1, f1, x2, f2, frozenset(on_cycle - {x1, x2}), 1, l0 - 1, (short, long))
            _check_parity(g, adj)
            return adj
        blocked |= on_cycle
    raise InsufficientExpansion(f"no expansions of size {D} fit around {tried} shortest cycle(s)")


def chain_adjusters(g: Graph, target_r: int, D: int, m: int, avoid: Iterable[int] = (), *,
                    region: Iterable[int] | None = None) -> Adjuster:
    """Grow a range-``target_r`` adjuster by joining simple adjusters one at a time.

    The current adjuster (v1, F1, v2, F2, A1) and a fresh simple one
    (v3, F3, v4, F4, A2) found outside it are joined by a shortest path of
    length at most ``m`` from F1+F2 to F3+F4; extending it through the two
    expansions to their roots gives Q, and the composite keeps the two
    unjoined ends with A = A1 + A2 + V(Q).
    """
    if target_r < 1:
        raise ValueError("target_r must be at least 1")
    blocked = set(avoid)
    try:
        cur = build_simple_adjuster(g, D, m, blocked, region=region)
    except (NoCycle, InsufficientExpansion) as exc:
        raise ChainError(f"stage 1: {exc}", 1, None, exc) from exc
    while cur.k < target_r:
        stage = cur.k + 1
        try:
            nxt = build_simple_adjuster(g, D, m, blocked | cur.vertices(), region=region)
        except (NoCycle, InsufficientExpansion) as exc:
            raise ChainError(f"stage {stage}: {exc}", stage, cur, exc) from exc
        try:
            bridge = connect_avoiding(g, cur.f1.members | cur.f2.members, nxt.f1.members | nxt.f2.members,
                                      blocked | cur.a | nxt.a, max_len=m)
        except (NoPath, TooLong) as exc:
            raise ChainError(f"stage {stage}: {exc}", stage, cur, exc) from exc
        if bridge[0] in cur.f1.members:
            cur = cur.reversed()
        if bridge[-1] in nxt.f2.members:
            nxt = nxt.reversed()
        q = cur.f2.tree_path(g, bridge[0]) + bridge[1:] + tuple(reversed(nxt.f1.tree_path(g, bridge[-1])))[1:]
        r = cur.k
        paths = []
        for i in range(r + 2):
            i1 = min(i, r)
            i2 = i - i1
            paths.append(cur.paths[i1] + q[1:] + nxt.paths[i2][1:])
        a = cur.a | nxt.a | frozenset(q)
        if len(a) > 10 * m * (r + 1):
            exc = ValueError(f"|A| = {len(a)} exceeds 10m(r+1)")
            raise ChainError(f"stage {stage}: {exc}", stage, cur, exc)
        cur = Adjuster(cur.v1, cur.f1, nxt.v2, nxt.f2, a, r + 1,
                       cur.base_length + nxt.base_length + len(q) - 1, tuple(paths))
        _check_parity(g, cur)
    return cur


# --- two disjoint paths with a length budget ------------------------------------

@dataclass(frozen=True)
class PathPair:
    p: Path
    q: Path

    @property
    def total(self) -> int:
        return len(self.p) + len(self.q) - 2


def _detour(g: Graph, x: int, y: int, used: set[int], blocked, max_len: int) -> Path | None:
    """Shortest x..y path of length >= 2 through unused, unblocked vertices, at most ``max_len`` long."""
    starts = [w for w in g.adj[x] if w != y and w not in used and w not in blocked]
    if not starts or max_len < 2:
        return None
    stop = _Union(used, blocked)
    best = shortest_path(g, starts, [y], _Minus(stop, {y}), max_len - 1)
    if best is None:
        return None
    return (x,) + best


class _Union:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def __contains__(self, v) -> bool:
        return v in self.a or v in self.b


class _Minus:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def __contains__(self, v) -> bool:
        return v in self.a and v not in self.b


def _route_pair(g: Graph, a: int, b: int, c: int, d: int, lo: int, hi: int, blocked: set[int],
                max_rounds: int) -> tuple[PathPair | None, int | None]:
    best_total = None
    for p_first in (True, False):
        if p_first:
            p = shortest_path(g, [a], [b], blocked | {c, d})
            q = None if p is None else shortest_path(g, [c], [d], blocked | set(p))
        else:
            q = shortest_path(g, [c], [d], blocked | {a, b})
            p = None if q is None else shortest_path(g, [a], [b], blocked | set(q))
        if p is None or q is None:
            continue
        total = len(p) + len(q) - 2
        if best_total is None or total < best_total:
            best_total = total
        if total > hi:
            continue
        paths = [list(p), list(q)]
        used = set(p) | set(q)
        rounds = 0
        while total < lo and rounds < max_rounds:
            rounds += 1
            fitting = None
            short_of = None
            for which, path in enumerate(paths):
                for e in range(len(path) - 1):
                    det = _detour(g, path[e], path[e + 1], used, blocked, hi - total + 1)
                    if det is None:
                        continue
                    inc = len(det) - 2
                    if inc <= 0 or total + inc > hi:
                        continue
                    cand = (inc, which, e, det)
                    if total + inc >= lo:
                        if fitting is None or inc < fitting[0]:
                            fitting = cand
                    elif short_of is None or inc > short_of[0]:
                        short_of = cand
            pick = fitting or short_of
            if pick is None:
                break
            inc, which, e, det = pick
            path = paths[which]
            paths[which] = path[: e] + list(det) + path[e + 2:]
            used.update(det)
            total += inc
        if lo <= total <= hi:
            return PathPair(tuple(paths[0]), tuple(paths[1])), total
        if best_total is None or abs(total - lo) < abs(best_total - lo):
            best_total = total
    return None, best_total


def connect_pair_sum_length(g: Graph, f1: Expansion, f2: Expansion, f3: Expansion, f4: Expansion,
                            target_sum: int, slack: int, avoid: Iterable[int] = (), *,
                            max_rounds: int = 64) -> PathPair:
    """Vertex-disjoint P (from root(f1)) and Q (from root(f2)), ending at the roots of f3 and f4
    in either pairing, with ``target_sum <= len(P) + len(Q) <= target_sum + slack``.

    Both paths start shortest and are then lengthened by replacing single
    edges with detours through unused vertices.
    """
    blocked = set(avoid)
    fs = (f1, f2, f3, f4)
    for i in range(4):
        if fs[i].members & blocked:
            raise ValueError("expansions must avoid the avoid set")
        for j in range(i + 1, 4):
            if fs[i].members & fs[j].members:
                raise ValueError("expansions must be pairwise disjoint")
    if slack < 0:
        raise ValueError("slack must be non-negative")
    lo, hi = target_sum, target_sum + slack
    r1, r2, r3, r4 = (f.root for f in fs)
    best = None
    for b, d in ((r3, r4), (r4, r3)):
        pair, total = _route_pair(g, r1, b, r2, d, lo, hi, blocked, max_rounds)
        if pair is not None:
            return pair
        if total is not None and (best is None or abs(total - lo) < abs(best - lo)):
            best = total
    stage = "routing" if best is None else ("too-long" if best > hi else "lengthening")
    raise Unsatisfiable(f"no disjoint pair with total length in [{lo}, {hi}] (best {best})", stage, best)


# --- exact-length connection ----------------------------------------------------------

@dataclass(frozen=True)
class ConnectConfig:
    adjuster_range: int = 3
    adjuster_D: int = 2
    m: int = 8
    dfs_budget: int | None = 200_000
    use_adjuster: bool = True
    use_direct: bool = True


@dataclass
class ConnectOutcome:
    path: Path
    route: str                      # "adjuster" or "direct"
    notes: list[str] = field(default_factory=list)
    adjuster: Adjuster | None = None


def find_path_of_length(g: Graph, s: int, t: int, ell: int, avoid: Iterable[int] = (),
                        budget: int | None = 200_000) -> Path | None:
    """Depth-first search for a simple s,t-path of length exactly ``ell`` in ``g - avoid``.

    Pruned by the distance to ``t`` (a lower bound on the remaining length) and,
    in bipartite graphs, by parity.  Returns None when no such path exists and
    raises BudgetExceeded when ``budget`` nodes were expanded without an answer.
    """
    blocked = as_blocked(avoid)
    if s in blocked or t in blocked:
        return None
    if s == t:
        return (s,) if ell == 0 else None
    dist = bfs_distances(g, [t], blocked)
    if s not in dist or dist[s] > ell:
        return None
    if ell + 1 > len(dist):
        return None
    bip = g.sides is not None
    if bip and (ell - dist[s]) % 2:
        return None
    adj = g.adj
    path = [s]
    on_path = {s}
    stack = [iter(adj[s])]
    nodes = 0
    while stack:
        steps = len(path)          # length if the next vertex is appended
        remaining = ell - steps
        advanced = False
        for w in stack[-1]:
            if w in on_path or w in blocked:
                continue
            dw = dist.get(w)
            if dw is None or dw > remaining:
                continue
            if w == t:
                if remaining == 0:
                    return tuple(path + [t])
                continue
            if remaining == 0:
                continue
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExceeded(f"exact-length search exceeded {budget} nodes")
            path.append(w)
            on_path.add(w)
            stack.append(iter(adj[w]))
            advanced = True
            break
        if not advanced:
            stack.pop()
            on_path.discard(path.pop())
    return None


def connect_exact_length(g: Graph, f1: Expansion, f2: Expansion, ell: int, avoid: Iterable[int] = (),
                         cfg: ConnectConfig | None = None) -> Path:
    """A simple path of length exactly ``ell`` between the roots of ``f1`` and ``f2`` avoiding ``avoid``."""
    return connect_exact_length_traced(g, f1, f2, ell, avoid, cfg).path


def connect_exact_length_traced(g: Graph, f1: Expansion, f2: Expansion, ell: int, avoid: Iterable[int] = (),
                                cfg: ConnectConfig | None = None) -> ConnectOutcome:
    """As :func:`connect_exact_length`, also reporting which route produced the path.

    Route "adjuster": build an adjuster of range r outside f1, f2 and the avoid
    set, join the roots to its two ends by disjoint paths whose total length
    lies in [ell - l(A) - 2r, ell - l(A)], and close the remaining even gap
    with the matching adjuster path.  Route "direct": bounded exact-length
    search, used when the gadget route cannot be completed.
    """
    cfg = cfg or ConnectConfig()
    sides = g.sides
    if sides is None:
        raise ValueError("connect_exact_length needs a bipartite graph")
    blocked = set(avoid)
    v1, v2 = f1.root, f2.root
    if f1.members & f2.members:
        raise ValueError("f1 and f2 must be disjoint")
    if (f1.members | f2.members) & blocked:
        raise ValueError("expansions must avoid the avoid set")
    if g.component_ids[v1] != g.component_ids[v2]:
        raise Unsatisfiable("roots lie in different components", "precondition")
    if ell % 2 != parity_class(sides, v1, v2) % 2:
        raise ParityMismatch(f"length {ell} has the wrong parity for roots {v1}, {v2}")
    notes: list[str] = []
    base_dist = bfs_distances(g, [v1], blocked).get(v2)
    if base_dist is None:
        raise Unsatisfiable("roots disconnected once avoid is deleted", "precondition")
    if base_dist > ell:
        raise Unsatisfiable(f"distance {base_dist} exceeds target length {ell}", "precondition")

    if cfg.use_adjuster and ell >= 3:
        try:
            out = _adjuster_route(g, f1, f2, ell, blocked, cfg, notes)
        except (ChainError, Unsatisfiable, ValueError) as exc:
            notes.append(f"adjuster route: {exc}")
            out = None
        if out is not None:
            return out
    if cfg.use_direct:
        try:
            p = find_path_of_length(g, v1, v2, ell, blocked, cfg.dfs_budget)
        except BudgetExceeded as exc:
            notes.append(f"direct route: {exc}")
            raise Unsatisfiable("; ".join(notes), "direct-budget") from exc
        if p is not None:
            return ConnectOutcome(p, "direct", notes)
        notes.append("direct route: no path of that length exists")
        raise Unsatisfiable("; ".join(notes), "direct-exhausted")
    raise Unsatisfiable("; ".join(notes), "adjuster")


def _adjuster_route(g: Graph, f1: Expansion, f2: Expansion, ell: int, blocked: set[int],
                    cfg: ConnectConfig, notes: list[str]) -> ConnectOutcome | None:
    v1, v2 = f1.root, f2.root
    fence = blocked | f1.members | f2.members
    region = ball(g, [v1, v2], max(1, math.ceil(ell / 2)), blocked)
    # a shorter chain has a shorter base, so fall back through smaller ranges
    r = cfg.adjuster_range
    while r >= 1:
        try:
            adj = chain_adjusters(g, r, cfg.adjuster_D, cfg.m, fence, region=region)
        except ChainError as exc:
            if exc.partial is None:
                raise
            notes.append(f"adjuster chain stopped at stage {exc.stage}")
            adj = exc.partial
        out = _close_with(g, f1, f2, ell, blocked, adj, notes)
        if out is not None:
            return out
        r = min(r, adj.k) - 1
    return None


def _close_with(g: Graph, f1: Expansion, f2: Expansion, ell: int, blocked: set[int], adj: Adjuster,
                notes: list[str]) -> ConnectOutcome | None:
    hi = ell - adj.base_length
    lo = max(0, hi - 2 * adj.k)
    if hi < 0:
        notes.append(f"range {adj.k}: base length {adj.base_length} exceeds target {ell}")
        return None
    try:
        pair = connect_pair_sum_length(g, f1, f2, adj.f1, adj.f2, lo, hi - lo, blocked | adj.a)
    except Unsatisfiable as exc:
        notes.append(f"range {adj.k}: {exc}")
        return None
    p, q = pair.p, pair.q
    gap = ell - pair.total - adj.base_length
    if gap % 2 or not 0 <= gap <= 2 * adj.k:
        raise AssertionError(f"parity bookkeeping broke: residual {gap}")
    r = adj.paths[gap // 2]
    if p[-1] == adj.v1:
        full = p + r[1:] + tuple(reversed(q))[1:]
    else:
        full = p + tuple(reversed(r))[1:] + tuple(reversed(q))[1:]
    if not (is_path(g, full) and len(full) - 1 == ell and not set(full) & blocked):
        notes.append("assembled path failed its self-check")
        return None
    return ConnectOutcome(full, "adjuster", notes, adj)
