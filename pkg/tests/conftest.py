import networkx as nx
import pytest

from balsub.graph_core import Graph


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h, ordering="sorted")
    return Graph.from_edges(h.number_of_nodes(), list(h.edges()))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def kbip(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


NAMED = {
    "C5": lambda: cycle(5),
    "C6": lambda: cycle(6),
    "K4": lambda: from_nx(nx.complete_graph(4)),
    "K5": lambda: from_nx(nx.complete_graph(5)),
    "K33": lambda: kbip(3, 3),
    "K44": lambda: kbip(4, 4),
    "Q3": lambda: from_nx(nx.hypercube_graph(3)),
    "Petersen": lambda: from_nx(nx.petersen_graph()),
}


@pytest.fixture
def c6() -> Graph:
    return cycle(6)


# one summary line per acceptance criterion
_ACCEPTANCE: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(item.user_properties).get("detail", "")
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _ACCEPTANCE.append(f"{status}  {marker.args[0]}" + (f"  ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
