import numpy as np
import pytest

from colas.graph import Graph


def make_graph(n, edges):
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, e[:, 0], e[:, 1])


def random_graph(n, p, seed):
    gen = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = gen.random(len(iu)) < p
    return make_graph(n, np.stack([iu[keep], ju[keep]], axis=1))


@pytest.fixture
def p3():
    return make_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def k3():
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4():
    return make_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def star3():
    return make_graph(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def two_edges():
    return make_graph(4, [(0, 1), (2, 3)])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
