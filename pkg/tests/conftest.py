from __future__ import annotations

import networkx as nx
import numpy as np
import pytest
from hypothesis import settings

from hyperpaths.hyperspace import FiniteSubset, canonicalize
from hyperpaths.metric import EuclideanSpace, GroundSpace, TaxicabCross, WeightedGraph

# fixed example sequence so every run checks the same cases
settings.register_profile("repro", derandomize=True, print_blob=True)
settings.load_profile("repro")

# -- independent oracles ----------------------------------------------


def exhaustive_hausdorff(space: GroundSpace, A: FiniteSubset, B: FiniteSubset) -> float:
    """max(sup_a inf_b d, sup_b inf_a d) by explicit loops over scalar distances."""
    pa, pb = A.points, B.points
    ab = max(min(space.distance(a, b) for b in pb) for a in pa)
    ba = max(min(space.distance(a, b) for a in pa) for b in pb)
    return max(ab, ba)


def min_edge_cover_size(x_len: int, y_len: int, allowed: list[tuple[int, int]]) -> int | None:
    """Smallest complete relation using ``allowed`` pairs, via Gallai's identity.

    A complete relation is an edge cover of the bipartite graph, and the
    minimum edge cover has |V| - (maximum matching) edges.
    """
    G = nx.Graph()
    left = [("x", i) for i in range(x_len)]
    G.add_nodes_from(left)
    G.add_nodes_from(("y", j) for j in range(y_len))
    G.add_edges_from((("x", i), ("y", j)) for i, j in allowed)
    if any(G.degree(v) == 0 for v in G.nodes):
        return None
    matching = nx.bipartite.maximum_matching(G, top_nodes=left)
    return x_len + y_len - len(matching) // 2


# -- random data --------------------------------------------------------

SMALL_GRAPH = WeightedGraph(
    5, ((0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.5), (3, 0, 2.5), (1, 3, 1.25), (3, 4, 0.75))
)

SPACES = {
    "r1": EuclideanSpace(1),
    "r2": EuclideanSpace(2),
    "cross": TaxicabCross(),
    "graph": SMALL_GRAPH,
}


def random_points(space: GroundSpace, rng: np.random.Generator, k: int) -> np.ndarray:
    if isinstance(space, EuclideanSpace):
        return rng.uniform(-1.0, 1.0, size=(k, space.d))
    if isinstance(space, TaxicabCross):
        vals = rng.uniform(-1.0, 1.0, size=k)
        axis = rng.integers(0, 2, size=k)
        out = np.zeros((k, 2))
        out[np.arange(k), axis] = vals
        return out
    if isinstance(space, WeightedGraph):
        eids = rng.integers(0, len(space.edges), size=k)
        w = np.array([space.edges[e][2] for e in eids])
        return np.column_stack([eids.astype(float), rng.uniform(0.0, 1.0, size=k) * w])
    raise TypeError(space)


def random_set(space: GroundSpace, rng: np.random.Generator, k: int) -> FiniteSubset:
    return canonicalize(space, random_points(space, rng, k))


def random_set_exact(space: GroundSpace, rng: np.random.Generator, k: int) -> FiniteSubset:
    """Random set with exactly k points (continuous draws never collide in practice)."""
    while True:
        S = random_set(space, rng, k)
        if len(S) == k:
            return S


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260419)


@pytest.fixture(params=sorted(SPACES))
def any_space(request) -> GroundSpace:
    return SPACES[request.param]


# -- acceptance summary -----------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[number] = (title, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
