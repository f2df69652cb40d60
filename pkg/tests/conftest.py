import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from meshsocial.graph import Graph  # noqa: E402


def path_graph(n):
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return Graph(range(leaves + 1), [(0, i) for i in range(1, leaves + 1)])


@st.composite
def graphs(draw, min_nodes=1, max_nodes=8, connected=False):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, mask) if keep]
    if connected:
        # random spanning tree on top guarantees connectivity
        for v in range(1, n):
            edges.append((draw(st.integers(0, v - 1)), v))
    return Graph(range(n), edges)


@st.composite
def permutations_of(draw, g):
    nodes = list(g.nodes)
    perm = draw(st.permutations(nodes))
    return dict(zip(nodes, perm))


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def star4():
    return star_graph(4)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Print one acceptance verdict line, live and again in the run summary."""

    def emit(line):
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
