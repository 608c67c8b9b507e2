import pytest

from balsub.graph_core import read_edge_list
from balsub.harness import (GeneratorSpec, bench_scaling, complete_bipartite_union, cycle, generate, hypercube,
                            random_bipartite, random_regular, run_cli)
from balsub.verify import SubdivisionCertificate


def test_generator_examples():
    g = complete_bipartite_union(3, 2)
    assert (g.n, g.m) == (12, 18) and all(g.degree(v) == 3 for v in range(12))
    q3 = hypercube(3)
    assert (q3.n, q3.m) == (8, 12) and q3.sides is not None and all(q3.degree(v) == 3 for v in range(8))
    c6 = cycle(6)
    assert c6.m == 6 and all(c6.has_edge(i, (i + 1) % 6) for i in range(6))


def test_random_generators_are_seeded():
    a = random_regular(50, 3, seed=4)
    assert a == random_regular(50, 3, seed=4)
    assert all(a.degree(v) == 3 for v in range(50))
    b = random_bipartite(30, 4, seed=2)
    assert b == random_bipartite(30, 4, seed=2) and b.sides is not None
    assert generate(GeneratorSpec.of("random_regular", 4, n=50, d=3)) == a


def test_generator_errors():
    with pytest.raises(ValueError):
        generate(GeneratorSpec.of("petersen"))
    with pytest.raises(ValueError):
        generate(GeneratorSpec.of("cycle"))
    with pytest.raises(ValueError):
        random_regular(5, 3)
    with pytest.raises(ValueError):
        cycle(2)


def test_bench_examples(tmp_path):
    sweep = [GeneratorSpec.of("complete_bipartite_union", d=d) for d in (4, 8, 16)]
    table = bench_scaling(sweep, cert_dir=str(tmp_path))
    ks = [r.k for r in table.rows]
    assert len(ks) == 3 and ks == sorted(ks)
    assert all(r.verified for r in table.rows)
    assert not table.warnings
    for line in table.results().splitlines():
        assert line.startswith("row n=") and " ms=" in line
    assert "sqrt d" in table.to_text()
    assert len(list(tmp_path.glob("*.tkc"))) == 3
    assert bench_scaling([]).rows == []


def test_bench_failed_row_is_recorded(monkeypatch):
    import balsub.harness as h

    def boom(g, cfg):
        raise RuntimeError("synthetic")

    monkeypatch.setattr(h, "build_auto", boom)
    table = bench_scaling([GeneratorSpec.of("cycle", n=6)])
    assert table.rows[0].flag == "error:RuntimeError" and table.rows[0].branch == "error"


def test_bench_fallback_row_is_flagged():
    table = bench_scaling([GeneratorSpec.of("cycle", n=7)])
    assert table.rows[0].k <= 2 and table.rows[0].flag == "fallback"


def test_cli_end_to_end(tmp_path, capsys):
    q3 = tmp_path / "q3.el"
    assert run_cli(["gen", "--family", "hypercube", "--k", "3", "--out", str(q3)]) == 0
    assert read_edge_list(q3).m == 12
    assert run_cli(["oracle", "--input", str(q3), "--max-ell", "4"]) == 0
    assert "best_k=3" in capsys.readouterr().out
    cert = tmp_path / "c.tkc"
    trace = tmp_path / "t.trace"
    assert run_cli(["find", "--input", str(q3), "--out", str(cert), "--trace", str(trace), "--seed", "1"]) == 0
    assert run_cli(["verify", "--input", str(q3), "--cert", str(cert)]) == 0
    assert trace.read_text().startswith("branch:")
    c = SubdivisionCertificate.read(cert)
    key = sorted(c.paths)[0]
    c.paths[key] = (key[0], key[0] ^ 4, key[1])
    c.write(cert)
    assert run_cli(["verify", "--input", str(q3), "--cert", str(cert)]) == 1


def test_cli_usage_errors(tmp_path, capsys):
    assert run_cli(["frobnicate"]) == 2
    assert run_cli([]) == 2
    assert run_cli(["verify", "--input", str(tmp_path / "missing.el"), "--cert", "x"]) == 2
    bad = tmp_path / "bad.el"
    bad.write_text("p 2 1\n0 5\n")
    assert run_cli(["oracle", "--input", str(bad), "--max-ell", "2"]) == 2


def test_cli_extract_expander(tmp_path, capsys):
    g = tmp_path / "g.el"
    run_cli(["gen", "--family", "complete_bipartite_union", "--d", "4", "--copies", "2", "--out", str(g)])
    out = tmp_path / "h.el"
    assert run_cli(["extract-expander", "--input", str(g), "--out", str(out), "--mode", "exact"]) == 0
    assert read_edge_list(out).n == 8
    assert "holds=True" in capsys.readouterr().out


def test_cli_bench_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    args = ["bench", "--d", "4", "8", "--no-timing", "--seed", "3"]
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert run_cli(["bench", "--family", "random_regular", "--d", "3", "--n", "30", "--out", str(a)]) == 0
