"""Graph generators, the scaling benchmark, and the command-line interface."""

from __future__ import annotations

import argparse
import logging
import math
import random
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from .builder import PRESETS, BuildConfig, build_auto
from .errors import BalsubError, BudgetExceeded, GraphFormatError
from .expander import extract_bipartite_expander, extract_expander
from .graph_core import Graph, average_degree, read_edge_list, write_edge_list
from .verify import OracleLimits, SubdivisionCertificate, oracle_max_subdivision, verify_subdivision

log = logging.getLogger(__name__)

FAMILIES = ("complete_bipartite_union", "complete", "hypercube", "cycle", "random_bipartite", "random_regular")


# --- generators --------------------------------------------------------------------------

def complete_bipartite_union(d: int, copies: int = 1) -> Graph:
    if d < 1 or copies < 1:
        raise ValueError("complete_bipartite_union needs d >= 1 and copies >= 1")
    edges = []
    for c in range(copies):
        base = 2 * d * c
        edges += [(base + i, base + d + j) for i in range(d) for j in range(d)]
    return Graph.from_edges(2 * d * copies, edges)


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete needs n >= 1")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def hypercube(k: int) -> Graph:
    if k < 0:
        raise ValueError("hypercube needs k >= 0")
    n = 1 << k
    return Graph.from_edges(n, [(v, v ^ (1 << i)) for v in range(n) for i in range(k) if v < v ^ (1 << i)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_bipartite(n: int, d: int, seed: int = 0) -> Graph:
    """Pairing model between two sides of ``n`` vertices with ``d`` stubs each; parallel edges merge."""
    if n < 1 or not 0 <= d <= n:
        raise ValueError("random_bipartite needs n >= 1 and 0 <= d <= n")
    rng = random.Random(seed)
    right = [n + v for v in range(n) for _ in range(d)]
    rng.shuffle(right)
    left = [v for v in range(n) for _ in range(d)]
    edges = set(zip(left, right))
    return Graph.from_edges(2 * n, sorted(edges))


def random_regular(n: int, d: int, seed: int = 0, max_restarts: int = 1000) -> Graph:
    """d-regular graph from the pairing model; a pair that would make a loop or a
    repeated edge is rejected and redrawn, and a stuck pairing restarts."""
    if n < 1 or d < 0 or d >= n or (n * d) % 2:
        raise ValueError("random_regular needs 0 <= d < n and n*d even")
    rng = random.Random(seed)
    for _ in range(max_restarts):
        stubs = [v for v in range(n) for _ in range(d)]
        edges: set[tuple[int, int]] = set()
        ok = True
        while stubs:
            for _try in range(100):
                i, j = rng.sample(range(len(stubs)), 2)
                u, v = stubs[i], stubs[j]
                if u != v and (min(u, v), max(u, v)) not in edges:
                    break
            else:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
            for idx in sorted((i, j), reverse=True):
                stubs[idx] = stubs[-1]
                stubs.pop()
        if ok:
            return Graph.from_edges(n, sorted(edges))
    raise RuntimeError(f"random_regular({n}, {d}) failed after {max_restarts} restarts")


_REQUIRED = {
    "complete_bipartite_union": ("d",),
    "complete": ("n",),
    "hypercube": ("k",),
    "cycle": ("n",),
    "random_bipartite": ("n", "d"),
    "random_regular": ("n", "d"),
}


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple[tuple[str, int], ...] = ()
    seed: int = 0

    @classmethod
    def of(cls, family: str, seed: int = 0, **params) -> "GeneratorSpec":
        return cls(family, tuple(sorted(params.items())), seed)

    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params)
        return f"{self.family}({inner})"


def generate(spec: GeneratorSpec) -> Graph:
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown family {spec.family!r}; choose from {', '.join(FAMILIES)}")
    p = dict(spec.params)
    missing = [k for k in _REQUIRED[spec.family] if k not in p]
    if missing:
        raise ValueError(f"{spec.family} needs parameter(s) {', '.join(missing)}")
    f = spec.family
    if f == "complete_bipartite_union":
        return complete_bipartite_union(p["d"], p.get("copies", 1))
    if f == "complete":
        return complete(p["n"])
    if f == "hypercube":
        return hypercube(p["k"])
    if f == "cycle":
        return cycle(p["n"])
    if f == "random_bipartite":
        return random_bipartite(p["n"], p["d"], spec.seed)
    return random_regular(p["n"], p["d"], spec.seed)


# --- benchmark ------------------------------------------------------------------------------

@dataclass
class BenchRow:
    label: str
    n: int
    m: int
    d: float
    k: int
    ell: int
    branch: str
    ms: int
    sqrt_d: float
    d_c: float
    verified: bool
    flag: str = ""

    def record(self) -> str:
        line = (f"row n={self.n} m={self.m} d={self.d:.4f} k={self.k} ell={self.ell} "
                f"branch={self.branch} ms={self.ms}")
        extra = f" family={self.label} sqrt_d={self.sqrt_d:.4f} d_c={self.d_c:.4f} verified={int(self.verified)}"
        return line + extra + (f" flag={self.flag}" if self.flag else "")


@dataclass
class BenchTable:
    rows: list[BenchRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        head = f"{'graph':<40} {'n':>6} {'m':>7} {'d':>8} {'k':>3} {'ell':>4} {'sqrt d':>7} {'d^c':>7} {'branch':<16} {'ms':>7}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lines.append(f"{r.label:<40} {r.n:>6} {r.m:>7} {r.d:>8.3f} {r.k:>3} {r.ell:>4} {r.sqrt_d:>7.3f} "
                         f"{r.d_c:>7.3f} {r.branch:<16} {r.ms:>7}" + (f"  [{r.flag}]" if r.flag else ""))
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"

    def results(self) -> str:
        return "".join(r.record() + "\n" for r in self.rows)


def _bench_one(spec: GeneratorSpec, cfg: BuildConfig, timing: bool, cert_dir: str | None, index: int) -> BenchRow:
    g = generate(spec)
    d = average_degree(g)
    t0 = time.perf_counter()
    flag = ""
    try:
        res = build_auto(g, cfg)
        cert, branch = res.cert, res.trace.branch or "none"
        if branch in ("trivial", "parity-fallback") or cert.k <= 2:
            flag = "fallback" if cert.k <= 2 else ""
    except Exception as exc:  # a failed row is recorded, the sweep goes on
        log.warning("row %s failed: %s", spec.label(), exc)
        cert = SubdivisionCertificate((), {}, cfg.ell or 2)
        branch, flag = "error", f"error:{type(exc).__name__}"
    ms = round((time.perf_counter() - t0) * 1000) if timing else 0
    ok = bool(verify_subdivision(g, cert))
    if cert_dir is not None and cert.k >= 2:
        path = FsPath(cert_dir) / f"row{index:03d}.tkc"
        cert.write(path)
        ok = ok and bool(verify_subdivision(g, SubdivisionCertificate.read(path)))
    return BenchRow(spec.label(), g.n, g.m, d, cert.k, cert.ell, branch, ms, math.sqrt(d), d ** cfg.c, ok, flag)


def bench_scaling(sweep: list[GeneratorSpec], cfg: BuildConfig | None = None, *, timing: bool = True,
                  cert_dir: str | None = None, workers: int = 1) -> BenchTable:
    """Run build_auto over each generated graph; rows stay in sweep order.

    Achieved k falling as d grows within one family is reported as a warning.
    """
    cfg = cfg or BuildConfig()
    if cert_dir is not None:
        FsPath(cert_dir).mkdir(parents=True, exist_ok=True)
    args = [(spec, cfg, timing, cert_dir, i) for i, spec in enumerate(sweep)]
    if workers > 1 and len(sweep) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, *zip(*args)))
    else:
        rows = [_bench_one(*a) for a in args]
    table = BenchTable(rows)
    last: dict[str, BenchRow] = {}
    for spec, row in zip(sweep, rows):
        prev = last.get(spec.family)
        if prev is not None and row.d >= prev.d and row.k < prev.k:
            msg = f"k fell from {prev.k} to {row.k} between {prev.label} and {row.label}"
            table.warnings.append(msg)
            warnings.warn(msg, stacklevel=2)
        last[spec.family] = row
    return table


# --- command line ------------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="balsub", description="Balanced clique subdivisions: build, verify, search.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)

    def regime(p):
        p.add_argument("--preset", choices=PRESETS, default="desk")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("find", help="build a certificate with the automatic pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--target-k", type=int)
    p.add_argument("--out", help="certificate file (default: stdout)")
    p.add_argument("--trace", help="write the pipeline trace here")
    regime(p)

    p = sub.add_parser("verify", help="check a certificate against a graph")
    p.add_argument("--input", required=True)
    p.add_argument("--cert", required=True)

    p = sub.add_parser("oracle", help="exhaustive maximum for small graphs")
    p.add_argument("--input", required=True)
    p.add_argument("--max-ell", type=int, required=True)
    p.add_argument("--max-nodes", type=int, default=5_000_000)
    p.add_argument("--out", help="write the witness certificate here")

    p = sub.add_parser("extract-expander", help="extract an expander subgraph")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epsilon1", type=float, default=0.5)
    p.add_argument("--epsilon2", type=float, default=0.1)
    p.add_argument("--bipartite-d", type=float, help="also require bipartite with this minimum degree")
    p.add_argument("--mode", choices=("exact", "sampled"), help="expansion check (default: exact up to 20 vertices)")
    regime(p)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("--family", choices=FAMILIES, required=True)
    for name in ("n", "d", "k", "copies"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="scaling benchmark over one family")
    p.add_argument("--family", choices=FAMILIES, default="complete_bipartite_union")
    p.add_argument("--d", type=int, nargs="+", default=[4, 8, 16, 32], help="swept degree values")
    p.add_argument("--n", type=int, help="vertices (or vertices per side) for random families")
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--out", help="results file (default: stdout only)")
    p.add_argument("--cert-dir")
    p.add_argument("--no-timing", action="store_true", help="write ms=0 so reruns are byte-identical")
    p.add_argument("--workers", type=int, default=1)
    regime(p)
    return ap


def _spec_from(args) -> GeneratorSpec:
    keys = {"complete_bipartite_union": ("d", "copies"), "complete": ("n",), "hypercube": ("k",),
            "cycle": ("n",), "random_bipartite": ("n", "d"), "random_regular": ("n", "d")}[args.family]
    params = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return GeneratorSpec.of(args.family, args.seed, **params)


def _sweep(args) -> list[GeneratorSpec]:
    out = []
    for d in args.d:
        if args.family == "complete_bipartite_union":
            out.append(GeneratorSpec.of(args.family, args.seed, d=d, copies=args.copies))
        elif args.family == "hypercube":
            out.append(GeneratorSpec.of(args.family, args.seed, k=d))
        elif args.family == "complete":
            out.append(GeneratorSpec.of(args.family, args.seed, n=d + 1))
        elif args.family == "cycle":
            raise ValueError("cycle has fixed degree; sweep another family")
        else:
            n = args.n if args.n is not None else 4 * d
            out.append(GeneratorSpec.of(args.family, args.seed, n=n, d=d))
    return out


def _cmd_find(args) -> int:
    g = read_edge_list(args.input)
    cfg = BuildConfig(ell=args.ell, target_k=args.target_k, preset=args.preset, seed=args.seed)
    res = build_auto(g, cfg)
    text = res.cert.to_text()
    if args.out:
        FsPath(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.trace:
        FsPath(args.trace).write_text(res.trace.to_text())
    print(f"k={res.cert.k} ell={res.cert.ell} branch={res.trace.branch}", file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    g = read_edge_list(args.input)
    cert = SubdivisionCertificate.read(args.cert)
    report = verify_subdivision(g, cert)
    if report:
        print(f"ok k={cert.k} ell={cert.ell}")
        return 0
    print(f"invalid: clause ({report.clause}) pair={report.pair}: {report.message}")
    return 1


def _cmd_oracle(args) -> int:
    g = read_edge_list(args.input)
    try:
        res = oracle_max_subdivision(g, args.max_ell, OracleLimits(max_nodes=args.max_nodes))
        exact = True
    except BudgetExceeded as exc:
        res, exact = exc.best, False
    print(f"best_k={res.best_k} best_ell={res.best_ell} nodes={res.nodes_explored}"
          + ("" if exact else " (budget exceeded: lower bound)"))
    if args.out:
        res.witness.write(args.out)
    return 0


def _cmd_extract(args) -> int:
    g = read_edge_list(args.input)
    if args.bipartite_d is not None:
        res = extract_bipartite_expander(g, args.bipartite_d, args.epsilon2, args.epsilon1, mode=args.mode,
                                         seed=args.seed)
    else:
        res = extract_expander(g, args.epsilon2, args.epsilon1, mode=args.mode, seed=args.seed)
    h = res.subgraph
    write_edge_list(h, args.out, [f"origin {' '.join(map(str, res.origin))}"])
    print(f"n={h.n} m={h.m} d={average_degree(h):.4f}")
    print(f"report mode={res.report.mode} holds={res.report.holds} subsets_checked={res.report.subsets_checked}")
    return 0


def _cmd_gen(args) -> int:
    g = generate(_spec_from(args))
    write_edge_list(g, args.out)
    print(f"n={g.n} m={g.m}")
    return 0


def _cmd_bench(args) -> int:
    cfg = BuildConfig(preset=args.preset, seed=args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = bench_scaling(_sweep(args), cfg, timing=not args.no_timing, cert_dir=args.cert_dir,
                              workers=args.workers)
    sys.stdout.write(table.to_text())
    if args.out:
        FsPath(args.out).write_text(table.results())
    return 0 if all(r.verified for r in table.rows) else 1


_COMMANDS = {"find": _cmd_find, "verify": _cmd_verify, "oracle": _cmd_oracle,
             "extract-expander": _cmd_extract, "gen": _cmd_gen, "bench": _cmd_bench}


def run_cli(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code (2 for usage errors)."""
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (GraphFormatError, OSError, ValueError) as exc:
        print(f"balsub {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BalsubError as exc:
        print(f"balsub {args.command}: failed: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
