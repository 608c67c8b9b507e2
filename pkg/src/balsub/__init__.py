"""Balanced clique subdivisions: expander extraction, exact-length routing with adjusters,
greedy assembly pipelines and certificate verification."""

from .adjuster import (Adjuster, ConnectConfig, build_simple_adjuster, chain_adjusters, connect_exact_length,
                       connect_pair_sum_length, verify_adjuster)
from .builder import (BuildConfig, build_auto, build_dense, build_sparse_bounded, build_sparse_highdeg,
                      select_far_apart_cores, strip_high_degree)
from .connect import Expansion, PathFan, check_consecutive_shortest, connect_avoiding, grow_expansion
from .errors import BalsubError
from .expander import ExpanderParams, extract_bipartite_expander, extract_expander, verify_expander
from .graph_core import Graph, parse_edge_list, pi, read_edge_list, shortest_cycle
from .harness import GeneratorSpec, bench_scaling, generate, run_cli
from .verify import OracleResult, SubdivisionCertificate, oracle_max_subdivision, verify_subdivision

__version__ = "0.1.0"
