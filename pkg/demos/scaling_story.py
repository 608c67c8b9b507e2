"""How the achieved clique order grows with degree.

Runs the automatic pipeline over a few families, prints the benchmark table
with its sqrt(d) reference column, and checks one certificate by hand
against the exhaustive search on a small graph.
"""

import warnings

from balsub.builder import build_auto
from balsub.harness import GeneratorSpec, bench_scaling, complete_bipartite_union
from balsub.verify import oracle_max_subdivision, verify_subdivision


def main() -> None:
    sweep = [GeneratorSpec.of("complete_bipartite_union", d=d) for d in (4, 8, 16, 32)]
    sweep += [GeneratorSpec.of("hypercube", k=k) for k in (4, 6, 8, 10)]
    sweep += [GeneratorSpec.of("random_regular", 1, n=400, d=d) for d in (3, 6, 12)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = bench_scaling(sweep)
    print(table.to_text())

    g = complete_bipartite_union(4)
    res = build_auto(g)
    best = oracle_max_subdivision(g, 7)
    print(f"K_4,4: pipeline k={res.cert.k} ell={res.cert.ell} via {res.trace.branch}; "
          f"exhaustive best k={best.best_k} ell={best.best_ell}; verified={bool(verify_subdivision(g, res.cert))}")
    print(res.cert.to_text())


if __name__ == "__main__":
    main()
