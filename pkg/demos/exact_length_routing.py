"""Walk through the exact-length routing machinery on a hypercube.

Builds a chained adjuster, shows its path lengths forming a step-2
progression, then joins two far vertices by paths of several exact lengths.
"""

from balsub.adjuster import ConnectConfig, chain_adjusters, connect_exact_length_traced, verify_adjuster
from balsub.connect import grow_expansion
from balsub.errors import ParityMismatch, Unsatisfiable
from balsub.graph_core import pi
from balsub.harness import hypercube


def main() -> None:
    g = hypercube(6)
    print(f"Q6: n={g.n} m={g.m}")

    adj = chain_adjusters(g, 3, 2, 4)
    print(f"adjuster v1={adj.v1} v2={adj.v2} |A|={len(adj.a)} lengths={adj.lengths()}")
    print(f"  valid: {verify_adjuster(g, adj, 2, 4)}  pi(v1, v2)={pi(g, adj.v1, adj.v2)}")

    f1 = grow_expansion(g, 0, 2, 2)
    f2 = grow_expansion(g, 63, 2, 2, f1.members)
    cfg = ConnectConfig(adjuster_range=2, m=4)
    for ell in (6, 8, 10, 12, 7):
        try:
            out = connect_exact_length_traced(g, f1, f2, ell, (), cfg)
        except ParityMismatch as exc:
            print(f"  ell={ell:2d}: parity mismatch ({exc})")
            continue
        except Unsatisfiable as exc:
            print(f"  ell={ell:2d}: unsatisfiable at stage {exc.stage}")
            continue
        print(f"  ell={ell:2d}: route={out.route:<8} path={' '.join(map(str, out.path))}")


if __name__ == "__main__":
    main()
