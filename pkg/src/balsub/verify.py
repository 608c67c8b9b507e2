"""Subdivision certificates, their verifier, and an exhaustive oracle for small graphs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterator

from .errors import BudgetExceeded, GraphFormatError
from .graph_core import Graph, Path, bfs_distances

CLAUSES = {
    "a": "every pair of cores has a path",
    "b": "path endpoints are the pair's cores",
    "c": "every path edge exists in the graph",
    "d": "every path has length ell",
    "e": "internal vertices are distinct, pairwise disjoint and avoid the cores",
}


def pair_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass
class SubdivisionCertificate:
    """Cores of a balanced subdivision plus one path per unordered core pair, keyed (low, high)."""

    cores: tuple[int, ...]
    paths: dict[tuple[int, int], Path]
    ell: int

    @property
    def k(self) -> int:
        return len(self.cores)

    def internal_vertices(self) -> set[int]:
        out: set[int] = set()
        for p in self.paths.values():
            out.update(p[1:-1])
        return out

    def to_text(self) -> str:
        lines = [f"tkcert k={self.k} ell={self.ell}", "cores: " + " ".join(map(str, self.cores))]
        for (i, j) in sorted(self.paths):
            lines.append(f"path {i} {j}: " + " ".join(map(str, self.paths[(i, j)])))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SubdivisionCertificate":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if len(lines) < 2:
            raise GraphFormatError("certificate needs a header and a cores line")
        head = lines[0].split()
        try:
            if head[0] != "tkcert":
                raise ValueError
            fields = dict(tok.split("=", 1) for tok in head[1:])
            k, ell = int(fields["k"]), int(fields["ell"])
        except (ValueError, KeyError, IndexError):
            raise GraphFormatError(f"bad certificate header: {lines[0]!r}") from None
        if not lines[1].startswith("cores:"):
            raise GraphFormatError("second line must start with 'cores:'")
        try:
            cores = tuple(int(t) for t in lines[1][len("cores:"):].split())
            paths: dict[tuple[int, int], Path] = {}
            for ln in lines[2:]:
                left, right = ln.split(":", 1)
                tag, i, j = left.split()
                if tag != "path":
                    raise ValueError
                paths[(int(i), int(j))] = tuple(int(t) for t in right.split())
        except ValueError:
            raise GraphFormatError("malformed cores or path line") from None
        if len(cores) != k:
            raise GraphFormatError(f"header says k={k} but {len(cores)} cores listed")
        return cls(cores, paths, ell)

    def write(self, path) -> None:
        FsPath(path).write_text(self.to_text())

    @classmethod
    def read(cls, path) -> "SubdivisionCertificate":
        return cls.from_text(FsPath(path).read_text())

    def relabel(self, origin) -> "SubdivisionCertificate":
        """Map vertex ids through ``origin`` (e.g. back from a subgraph to its host)."""
        cores = tuple(origin[v] for v in self.cores)
        paths = {}
        for p in self.paths.values():
            q = tuple(origin[v] for v in p)
            paths[pair_key(q[0], q[-1])] = q if q[0] < q[-1] else tuple(reversed(q))
        return SubdivisionCertificate(cores, paths, self.ell)


def make_certificate(cores, paths, ell: int) -> SubdivisionCertificate:
    """Build a certificate, orienting every path from its lower core to its higher one."""
    norm = {}
    for p in paths:
        p = tuple(p)
        key = pair_key(p[0], p[-1])
        norm[key] = p if p[0] == key[0] else tuple(reversed(p))
    return SubdivisionCertificate(tuple(cores), norm, ell)


@dataclass(frozen=True)
class SubdivisionReport:
    ok: bool
    clause: str | None = None
    pair: tuple[int, int] | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_subdivision(g: Graph, cert: SubdivisionCertificate) -> SubdivisionReport:
    """Check clauses (a)-(e) in order; the report names the first violation found."""
    cores = cert.cores
    core_set = set(cores)
    if len(core_set) != len(cores):
        return SubdivisionReport(False, "a", None, "repeated core vertex")
    if any(not 0 <= v < g.n for v in cores):
        return SubdivisionReport(False, "a", None, "core vertex out of range")
    wanted = [pair_key(u, v) for u, v in itertools.combinations(cores, 2)]
    for key in wanted:
        if key not in cert.paths:
            return SubdivisionReport(False, "a", key, f"no path for pair {key}")
    extra = set(cert.paths) - set(wanted)
    if extra:
        key = min(extra)
        return SubdivisionReport(False, "a", key, f"path for non-core pair {key}")
    for key in sorted(wanted):
        p = cert.paths[key]
        if len(p) < 2 or {p[0], p[-1]} != set(key):
            return SubdivisionReport(False, "b", key, f"path for {key} has endpoints {p[:1]}..{p[-1:]}")
        for u, v in zip(p, p[1:]):
            if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
                return SubdivisionReport(False, "c", key, f"({u}, {v}) is not an edge")
        if len(p) - 1 != cert.ell:
            return SubdivisionReport(False, "d", key, f"length {len(p) - 1} != ell = {cert.ell}")
    owner: dict[int, tuple[int, int]] = {}
    for key in sorted(wanted):
        for v in cert.paths[key][1:-1]:
            if v in core_set:
                return SubdivisionReport(False, "e", key, f"internal vertex {v} is a core")
            if v in owner:
                return SubdivisionReport(False, "e", key, f"internal vertex {v} also used by {owner[v]}")
            owner[v] = key
    return SubdivisionReport(True)


# --- exhaustive oracle ---------------------------------------------------------------

@dataclass(frozen=True)
class OracleLimits:
    max_n: int = 14
    max_nodes: int | None = 5_000_000


@dataclass
class OracleResult:
    best_k: int
    best_ell: int
    witness: SubdivisionCertificate
    nodes_explored: int = 0


@dataclass
class _Search:
    g: Graph
    max_nodes: int | None
    nodes: int = 0
    failed: set = field(default_factory=set)

    def tick(self) -> None:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"oracle explored more than {self.max_nodes} nodes")

    def paths_of_length(self, s: int, t: int, ell: int, blocked: set[int]) -> Iterator[Path]:
        """All simple s,t-paths of length ell avoiding ``blocked`` (s and t must not be in it)."""
        g = self.g
        dist = bfs_distances(g, [t], blocked)
        if dist.get(s, ell + 1) > ell:
            return
        path = [s]
        on = {s}

        def rec(u: int):
            rem = ell - (len(path) - 1)
            for w in g.adj[u]:
                if w in on or w in blocked:
                    continue
                dw = dist.get(w)
                if dw is None or dw > rem - 1:
                    continue
                if w == t:
                    if rem == 1:
                        yield tuple(path) + (t,)
                    continue
                self.tick()
                path.append(w)
                on.add(w)
                yield from rec(w)
                on.discard(w)
                path.pop()

        yield from rec(s)

    def embed(self, cores: tuple[int, ...], ell: int) -> dict | None:
        key = (cores, ell)
        if key in self.failed:
            return None
        pairs = list(itertools.combinations(cores, 2))
        used = set(cores)
        chosen: dict = {}

        def rec(i: int) -> bool:
            if i == len(pairs):
                return True
            u, v = pairs[i]
            for p in self.paths_of_length(u, v, ell, used - {u, v}):
                inner = p[1:-1]
                used.update(inner)
                chosen[(u, v)] = p
                if rec(i + 1):
                    return True
                used.difference_update(inner)
                del chosen[(u, v)]
            return False

        if rec(0):
            return dict(chosen)
        self.failed.add(key)
        return None


def _candidate_bound(g: Graph, ell: int) -> int:
    """An upper bound on k for a balanced subdivision with this ell."""
    n = g.n
    k = 1
    while k + 1 + math.comb(k + 1, 2) * (ell - 1) <= n:
        k += 1
    k = min(k, g_max_degree(g) + 1)
    if ell == 1:
        return k
    sides = g.sides
    if sides is not None and ell % 2 == 1:
        return min(k, 2)
    return k


def g_max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adj), default=0)


def _core_sets(g: Graph, k: int, ell: int) -> Iterator[tuple[int, ...]]:
    comp = g.component_ids
    sides = g.sides
    eligible = [v for v in range(g.n) if len(g.adj[v]) >= k - 1]
    groups: dict = {}
    for v in eligible:
        if sides is not None and k >= 3:
            # odd ell forces k <= 2; even ell puts all cores on one side
            tag = (comp[v], sides[v])
        else:
            tag = (comp[v],)
        groups.setdefault(tag, []).append(v)
    for tag in sorted(groups):
        members = groups[tag]
        if len(members) < k:
            continue
        if sides is not None and k >= 3:
            comp_id, side = tag
            same = sum(1 for v in range(g.n) if comp[v] == comp_id and sides[v] == side)
            other = sum(1 for v in range(g.n) if comp[v] == comp_id and sides[v] != side)
            pairs = math.comb(k, 2)
            if pairs * (ell // 2) > other or k + pairs * (ell // 2 - 1) > same:
                continue
        else:
            size = sum(1 for v in range(g.n) if comp[v] == tag[0])
            if k + math.comb(k, 2) * (ell - 1) > size:
                continue
        yield from itertools.combinations(members, k)


def _trivial(g: Graph, ell: int) -> OracleResult:
    cores = (0,) if g.n else ()
    return OracleResult(len(cores), ell, SubdivisionCertificate(cores, {}, ell))


def oracle_at_ell(g: Graph, ell: int, limits: OracleLimits | None = None, *,
                  _search: _Search | None = None, floor: int = 0) -> OracleResult | None:
    """Largest k with a balanced subdivision of edge length exactly ``ell``.

    Only values above ``floor`` are searched; returns None when none exists.
    """
    limits = limits or OracleLimits()
    if g.n > limits.max_n:
        raise ValueError(f"oracle is limited to {limits.max_n} vertices")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    search = _search or _Search(g, limits.max_nodes)
    for k in range(_candidate_bound(g, ell), max(floor, 1), -1):
        for cores in _core_sets(g, k, ell):
            emb = search.embed(cores, ell)
            if emb is not None:
                cert = make_certificate(cores, emb.values(), ell)
                return OracleResult(k, ell, cert, search.nodes)
    if floor < 1 and g.n:
        return OracleResult(1, ell, SubdivisionCertificate((0,), {}, ell), search.nodes)
    return None


def oracle_max_subdivision(g: Graph, max_ell: int, limits: OracleLimits | None = None) -> OracleResult:
    """Exhaustive maximum k over 1 <= ell <= max_ell; ties go to the smallest ell.

    Lengths are scanned upward; within each, k is scanned downward from a
    counting bound and only values above the best so far are tried.  Raises
    BudgetExceeded carrying the best result so far (a lower bound).
    """
    limits = limits or OracleLimits()
    if g.n > limits.max_n:
        raise ValueError(f"oracle is limited to {limits.max_n} vertices")
    if max_ell < 1:
        raise ValueError("max_ell must be at least 1")
    best = _trivial(g, 1)
    search = _Search(g, limits.max_nodes)
    try:
        for ell in range(1, max_ell + 1):
            res = oracle_at_ell(g, ell, limits, _search=search, floor=best.best_k)
            if res is not None and res.best_k > best.best_k:
                best = res
    except BudgetExceeded as exc:
        best.nodes_explored = search.nodes
        raise BudgetExceeded(str(exc), best) from None
    best.nodes_explored = search.nodes
    return best
