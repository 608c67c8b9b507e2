"""Undirected simple graphs on vertices ``0..n-1`` and the basic queries on them.

Paths are plain tuples of vertex ids; ``len(path) - 1`` is the path length.
Every routine that works "in G - W" takes an explicit ``avoid`` collection
instead of building a copy of the graph.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path as FilePath
from typing import Iterable, Iterator, Sequence

from .errors import GraphFormatError

log = logging.getLogger(__name__)

Path = tuple  # tuple[int, ...]; vertices in order, consecutive pairs adjacent


class Graph:
    """Immutable simple undirected graph with sorted adjacency lists."""

    def __init__(self, n: int, adjacency: Sequence[Iterable[int]], bipartition: Sequence[int] | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(adjacency) != n:
            raise ValueError(f"adjacency has {len(adjacency)} rows for {n} vertices")
        adj = tuple(tuple(sorted(set(row))) for row in adjacency)
        for v, row in enumerate(adj):
            for u in row:
                if not 0 <= u < n:
                    raise ValueError(f"neighbour {u} of {v} out of range")
                if u == v:
                    raise ValueError(f"self-loop at {v}")
        self.n = n
        self.adj: tuple[tuple[int, ...], ...] = adj
        self.nbrs: tuple[frozenset[int], ...] = tuple(frozenset(row) for row in adj)
        for v, row in enumerate(adj):
            for u in row:
                if v not in self.nbrs[u]:
                    raise ValueError(f"adjacency not symmetric: {v}->{u}")
        self.bipartition: tuple[int, ...] | None = None
        if bipartition is not None:
            labels = tuple(int(x) for x in bipartition)
            if len(labels) != n or any(x not in (0, 1) for x in labels):
                raise ValueError("bipartition must give a 0/1 label per vertex")
            for u, v in self.edges():
                if labels[u] == labels[v]:
                    raise ValueError(f"edge {u}-{v} does not cross the bipartition")
            self.bipartition = labels

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], bipartition=None) -> "Graph":
        rows: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            rows[u].add(v)
            rows[v].add(u)
        return cls(n, rows, bipartition)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    @cached_property
    def m(self) -> int:
        return sum(len(row) for row in self.adj) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.adj):
            for v in row:
                if u < v:
                    yield (u, v)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbrs[u]

    @cached_property
    def sides(self) -> tuple[int, ...] | None:
        """The canonical 2-colouring (see :func:`bipartition`), cached."""
        if self.bipartition is not None:
            return self.bipartition
        labels = bipartition(self)
        return None if labels is None else tuple(labels)

    @cached_property
    def component_ids(self) -> tuple[int, ...]:
        comp = [-1] * self.n
        c = 0
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            comp[s] = c
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if comp[w] < 0:
                        comp[w] = c
                        queue.append(w)
            c += 1
        return tuple(comp)

    def components(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(self.component_ids):
            groups.setdefault(c, []).append(v)
        return [groups[c] for c in sorted(groups)]

    def is_connected(self) -> bool:
        return self.n <= 1 or max(self.component_ids) == 0

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Return ``(H, origin)`` with ``origin[i]`` the id in ``self`` of vertex ``i`` of ``H``."""
        origin = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(origin)}
        rows = [[index[u] for u in self.adj[v] if u in index] for v in origin]
        return Graph(len(origin), rows), origin

    def edge_subgraph(self, keep) -> "Graph":
        """Spanning subgraph with the edges ``(u, v)`` for which ``keep(u, v)`` is true."""
        rows = [[u for u in self.adj[v] if keep(v, u)] for v in range(self.n)]
        return Graph(self.n, rows)


@dataclass(frozen=True)
class DegreeStats:
    average: Fraction
    minimum: int
    maximum: int


def degree_stats(g: Graph) -> DegreeStats:
    if g.n == 0:
        return DegreeStats(Fraction(0), 0, 0)
    degs = [len(row) for row in g.adj]
    return DegreeStats(Fraction(2 * g.m, g.n), min(degs), max(degs))


def average_degree(g: Graph) -> float:
    return 2 * g.m / g.n if g.n else 0.0


def bipartition(g: Graph) -> list[int] | None:
    """2-colouring with the lowest id of every component on side 0, or None on an odd cycle."""
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] >= 0:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    queue.append(w)
                elif side[w] == side[u]:
                    return None
    return side


def as_blocked(avoid):
    """Use ``avoid`` directly when it supports fast membership, else copy it into a set."""
    if isinstance(avoid, (set, frozenset)):
        return avoid
    if hasattr(avoid, "__contains__") and not isinstance(avoid, (list, tuple, str)):
        return avoid
    return set(avoid)


def bfs_distances(g: Graph, sources: Iterable[int], avoid: Iterable[int] = (),
                  max_depth: int | None = None) -> dict[int, int]:
    """Distances from ``sources`` in ``g - avoid``, optionally cut off at ``max_depth``."""
    blocked = as_blocked(avoid)
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sorted(set(sources)):
        if s not in blocked:
            dist[s] = 0
            queue.append(s)
    adj = g.adj
    while queue:
        u = queue.popleft()
        du = dist[u]
        if max_depth is not None and du >= max_depth:
            continue
        for w in adj[u]:
            if w not in dist and w not in blocked:
                dist[w] = du + 1
                queue.append(w)
    return dist


def ball(g: Graph, x: Iterable[int], radius: int, avoid: Iterable[int] = ()) -> set[int]:
    """Vertices within ``radius`` of ``x`` in ``g - avoid`` (``x`` itself included)."""
    x = set(x)
    blocked = set(avoid)
    if x & blocked:
        raise ValueError("x must be disjoint from avoid")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    return set(bfs_distances(g, x, blocked, radius))


def neighbourhood(g: Graph, x: Iterable[int], avoid: Iterable[int] = ()) -> set[int]:
    """External neighbourhood N(X) in ``g - avoid``."""
    x = set(x)
    blocked = set(avoid)
    out: set[int] = set()
    for v in x:
        out.update(g.adj[v])
    return out - x - blocked


def shortest_path(g: Graph, sources: Iterable[int], targets: Iterable[int],
                  avoid: Iterable[int] = (), max_len: int | None = None) -> Path | None:
    """A shortest path from ``sources`` to ``targets`` in ``g - avoid``; None if none within ``max_len``.

    Sources are seeded in ascending order and neighbours scanned ascending, so
    the result is a deterministic function of the inputs.
    """
    blocked = as_blocked(avoid)
    targets = targets if isinstance(targets, (set, frozenset)) else set(targets)
    parent: dict[int, int] = {}
    queue: deque[int] = deque()
    depth: dict[int, int] = {}
    for s in sorted(set(sources)):
        if s in blocked:
            continue
        if s in targets:
            return (s,)
        parent[s] = -1
        depth[s] = 0
        queue.append(s)
    adj = g.adj
    while queue:
        u = queue.popleft()
        if max_len is not None and depth[u] >= max_len:
            continue
        for w in adj[u]:
            if w in parent or w in blocked:
                continue
            parent[w] = u
            depth[w] = depth[u] + 1
            if w in targets:
                out = [w]
                while parent[out[-1]] != -1:
                    out.append(parent[out[-1]])
                return tuple(reversed(out))
            queue.append(w)
    return None


def is_path(g: Graph, p: Sequence[int]) -> bool:
    if len(p) == 0 or len(set(p)) != len(p):
        return False
    return all(b in g.nbrs[a] for a, b in zip(p, p[1:]))


def pi(g: Graph, u: int, v: int) -> int:
    """Parity class of ``u, v``: 0 if equal, 1 if on different sides, 2 if on the same side."""
    sides = g.sides
    if sides is None:
        raise ValueError("pi needs a bipartite graph")
    if not g.is_connected():
        raise ValueError("pi needs a connected graph")
    return parity_class(sides, u, v)


def parity_class(sides: Sequence[int], u: int, v: int) -> int:
    if u == v:
        return 0
    return 1 if sides[u] != sides[v] else 2


def girth(g: Graph, avoid: Iterable[int] = (), region: Iterable[int] | None = None) -> int | None:
    """Length of a shortest cycle in ``g[region] - avoid``, or None for a forest."""
    blocked = _restrict(g, avoid, region)
    roots = [v for v in range(g.n) if v not in blocked]
    best = None
    adj = g.adj
    for r in roots:
        dist = {r: 0}
        parent = {r: -1}
        queue = deque([r])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if best is not None and 2 * du + 1 >= best:
                break
            for w in adj[u]:
                if w in blocked:
                    continue
                if w not in dist:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    length = du + dist[w] + 1
                    if best is None or length < best:
                        best = length
        if best == 3:
            break
    return best


def shortest_cycle(g: Graph, avoid: Iterable[int] = (), region: Iterable[int] | None = None,
                   exclude_roots: Iterable[int] = ()) -> Path | None:
    """A minimum-length cycle as a vertex tuple (closing edge implicit), or None.

    Among all shortest cycles the one returned starts at its smallest vertex and
    is lexicographically smallest as a sequence.
    """
    blocked = _restrict(g, avoid, region)
    length = girth(g, blocked)
    if length is None:
        return None
    skip = set(exclude_roots)
    adj = g.adj
    for r in range(g.n):
        if r in blocked or r in skip:
            continue
        # cycles with r as their smallest vertex live in the subgraph on ids > r
        dist = {r: 0}
        queue = deque([r])
        half = length // 2
        while queue:
            u = queue.popleft()
            if dist[u] >= half:
                continue
            for w in adj[u]:
                if w > r and w not in blocked and w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        found = _cycle_dfs(adj, g.nbrs, r, length, dist, blocked)
        if found is not None:
            return found
    return None


def _cycle_dfs(adj, nbrs, r: int, length: int, dist: dict[int, int], blocked) -> Path | None:
    path = [r]
    on_path = {r}
    iters = [iter(adj[r])]
    while iters:
        advanced = False
        for w in iters[-1]:
            if w <= r or w in on_path or w in blocked:
                continue
            steps = len(path)  # position w would take
            remaining = length - steps  # edges still needed after w, incl. closing edge
            dw = dist.get(w)
            if dw is None or dw > remaining:
                continue
            if steps == length - 1:
                if r in nbrs[w]:
                    return tuple(path + [w])
                continue
            path.append(w)
            on_path.add(w)
            iters.append(iter(adj[w]))
            advanced = True
            break
        if not advanced:
            iters.pop()
            on_path.discard(path.pop())
    return None


def _restrict(g: Graph, avoid: Iterable[int], region: Iterable[int] | None) -> set[int]:
    blocked = set(avoid)
    if region is not None:
        allowed = set(region)
        blocked.update(v for v in range(g.n) if v not in allowed)
    return blocked


def path_prefix(p: Sequence[int], v: int, r: int) -> Path:
    """The subpath of ``p`` of length ``r`` that starts at endpoint ``v``."""
    if not p or v not in (p[0], p[-1]):
        raise ValueError(f"{v} is not an endpoint of the path")
    if not 0 <= r <= len(p) - 1:
        raise ValueError(f"prefix length {r} outside [0, {len(p) - 1}]")
    seq = tuple(p) if p[0] == v else tuple(reversed(p))
    return seq[: r + 1]


# --- edge-list text format -------------------------------------------------------

def parse_edge_list(text: str) -> tuple[Graph, int]:
    """Parse ``p <n> <m>`` followed by ``<u> <v>`` lines; returns ``(graph, duplicates)``."""
    n = None
    declared_m = None
    edges: set[tuple[int, int]] = set()
    duplicates = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if parts[0] != "p" or len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: expected header 'p <n> <m>'")
            try:
                n, declared_m = int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: bad header") from exc
            if n < 0 or declared_m < 0:
                raise GraphFormatError(f"line {lineno}: negative counts")
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected '<u> <v>'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: vertex id out of range [0, {n})")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in edges:
            duplicates += 1
            continue
        edges.add(key)
    if n is None:
        raise GraphFormatError("missing 'p <n> <m>' header")
    if duplicates:
        log.warning("collapsed %d duplicate edges", duplicates)
    if declared_m != len(edges) + duplicates:
        log.warning("header declares %d edges, found %d lines", declared_m, len(edges) + duplicates)
    return Graph.from_edges(n, edges), duplicates


def format_edge_list(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"p {g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> Graph:
    graph, _ = parse_edge_list(FilePath(path).read_text())
    return graph


def write_edge_list(g: Graph, path, comments: Sequence[str] = ()) -> None:
    FilePath(path).write_text(format_edge_list(g, comments))
