"""Short connections in G - W, vertex expansions, ball growth and path fans."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import Insufficient, NoPath, TooLong
from .graph_core import Graph, Path, bfs_distances, shortest_path


@dataclass(frozen=True)
class Expansion:
    """A connected vertex set containing ``root`` whose members lie within ``radius_bound`` of it."""

    root: int
    members: frozenset[int]
    radius_bound: int

    @property
    def size(self) -> int:
        return len(self.members)

    def depths(self, g: Graph) -> dict[int, int]:
        """Distances from the root inside the induced subgraph on the members."""
        outside = _Complement(self.members)
        return bfs_distances(g, [self.root], outside)

    def is_valid(self, g: Graph) -> bool:
        if self.root not in self.members:
            return False
        depth = self.depths(g)
        return len(depth) == len(self.members) and max(depth.values()) <= self.radius_bound

    def tree_path(self, g: Graph, target: int) -> Path:
        """A shortest root-to-``target`` path inside the members."""
        p = shortest_path(g, [self.root], [target], _Complement(self.members))
        if p is None:
            raise ValueError(f"{target} not reachable inside the expansion")
        return p

    def trimmed(self, g: Graph, size: int) -> "Expansion":
        """A sub-expansion with ``size`` members and the same radius bound."""
        if not 1 <= size <= self.size:
            raise ValueError("trimmed size must lie in [1, |members|]")
        depth = self.depths(g)
        order = sorted(self.members, key=lambda v: (depth[v], v))
        return Expansion(self.root, frozenset(order[:size]), self.radius_bound)


class _Complement:
    """Membership test for "not in members", used as an avoid set."""

    __slots__ = ("members",)

    def __init__(self, members):
        self.members = members

    def __contains__(self, v) -> bool:
        return v not in self.members


def default_max_len(g: Graph, epsilon1: float = 0.5) -> int:
    """Length cap for short connections: (40/eps1) ln^3 n, but never more than n."""
    if g.n <= 1:
        return 0
    return min(g.n, math.ceil(40 / epsilon1 * math.log(g.n) ** 3))


def connect_avoiding(g: Graph, a: Iterable[int], b: Iterable[int], avoid: Iterable[int] = (),
                     max_len: int | None = None) -> Path:
    """Shortest A-to-B path in ``g - avoid``.

    Raises NoPath when A and B are disconnected there and TooLong when the
    shortest connection exceeds ``max_len`` (default: n).
    """
    a, b, blocked = set(a), set(b), set(avoid)
    if not a or not b:
        raise ValueError("a and b must be non-empty")
    if a & blocked or b & blocked:
        raise ValueError("a and b must be disjoint from avoid")
    cap = g.n if max_len is None else max_len
    p = shortest_path(g, a, b, blocked)
    if p is None:
        raise NoPath("no path between the sets once avoid is deleted")
    if len(p) - 1 > cap:
        raise TooLong(f"shortest path has length {len(p) - 1} > {cap}", len(p) - 1)
    return p


def grow_expansion(g: Graph, v: int, target_D: int, max_m: int, avoid: Iterable[int] = ()) -> Expansion:
    """BFS from ``v`` in ``g - avoid`` layer by layer; the last layer is cut to the smallest ids."""
    blocked = set(avoid)
    if v in blocked:
        raise ValueError("root is in the avoid set")
    if target_D < 1:
        raise ValueError("target_D must be at least 1")
    members = [v]
    seen = {v}
    layer = [v]
    depth = 0
    while len(members) < target_D:
        if depth >= max_m:
            raise Insufficient(f"radius {max_m} reaches only {len(members)} < {target_D} vertices", len(members))
        nxt = sorted({w for u in layer for w in g.adj[u] if w not in seen and w not in blocked})
        if not nxt:
            raise Insufficient(f"component holds only {len(members)} < {target_D} vertices", len(members))
        depth += 1
        take = nxt[: target_D - len(members)]
        members.extend(take)
        seen.update(nxt)
        layer = nxt
    return Expansion(v, frozenset(members), max_m)


@dataclass(frozen=True)
class BallGrowth:
    members: frozenset[int]
    radius: int
    target: int

    @property
    def met(self) -> bool:
        return len(self.members) >= self.target


def grow_ball_avoiding(g: Graph, y: Iterable[int], w: Iterable[int], radius: int, target: int) -> BallGrowth:
    """The ball of ``radius`` around ``y`` in ``g - w``, flagged with whether it reached ``target`` vertices."""
    y, blocked = set(y), set(w)
    if y & blocked:
        raise ValueError("y and w must be disjoint")
    members = frozenset(bfs_distances(g, y, blocked, radius))
    return BallGrowth(members, radius, target)


@dataclass
class PathFan:
    """Paths leaving ``root`` inside ``home``, kept in insertion order."""

    root: int
    home: frozenset[int]
    paths: list[Path] = field(default_factory=list)

    def vertices(self) -> set[int]:
        out: set[int] = set()
        for p in self.paths:
            out.update(p)
        return out


def check_consecutive_shortest(g: Graph, fan: PathFan) -> bool:
    """Each path is a shortest path between its ends in home minus earlier paths, plus the root."""
    used: set[int] = set()
    for p in fan.paths:
        if not p or p[0] != fan.root:
            return False
        if any(v not in fan.home for v in p):
            return False
        allowed = (fan.home - used) | {fan.root}
        blocked = _Complement(allowed)
        if any(v in blocked for v in p):
            return False
        dist = bfs_distances(g, [p[0]], blocked, len(p) - 1)
        if dist.get(p[-1]) != len(p) - 1:
            return False
        if any(q not in g.nbrs[r] for r, q in zip(p, p[1:])):
            return False
        used.update(p)
    return True


def fan_prefix_ok(g: Graph, fan: PathFan, prefix: Sequence[int]) -> bool:
    """Whether appending ``prefix`` keeps the fan consecutive-shortest."""
    trial = PathFan(fan.root, fan.home, list(fan.paths) + [tuple(prefix)])
    return check_consecutive_shortest(g, trial)
