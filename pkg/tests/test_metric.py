from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest

from hyperpaths.errors import DomainError, InvalidPointError
from hyperpaths.metric import (
    EuclideanSpace,
    ScaledQuasiconvex,
    TaxicabCross,
    WeightedGraph,
    geodesic_point,
    ground_distance,
    space_from_config,
)

from conftest import SMALL_GRAPH, SPACES, random_points


def test_euclidean_pythagoras():
    assert ground_distance(EuclideanSpace(2), (0, 0), (3, 4)) == 5.0


def test_taxicab_distance_across_axes():
    assert ground_distance(TaxicabCross(), (1, 0), (0, 1)) == 2.0


def test_taxicab_rejects_point_off_axes():
    with pytest.raises(InvalidPointError):
        ground_distance(TaxicabCross(), (1, 1), (0, 1))


def test_triangle_graph_distance_matches_dijkstra():
    g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)))
    G = nx.Graph()
    G.add_weighted_edges_from(g.edges)
    expected = nx.dijkstra_path_length(G, 0, 2)
    assert expected == 2.0
    assert ground_distance(g, g.vertex(0), g.vertex(2)) == expected


def test_graph_apsp_matches_dijkstra():
    G = nx.Graph()
    G.add_weighted_edges_from(SMALL_GRAPH.edges)
    for u in range(SMALL_GRAPH.n_vertices):
        lengths = nx.single_source_dijkstra_path_length(G, u)
        for v, d in lengths.items():
            got = SMALL_GRAPH.distance(SMALL_GRAPH.vertex(u), SMALL_GRAPH.vertex(v))
            assert got == pytest.approx(d, abs=1e-12)


def test_graph_interior_points_match_subdivided_dijkstra(rng):
    # oracle: insert each interior point as a new vertex and run Dijkstra
    g = SMALL_GRAPH
    pts = random_points(g, rng, 30)
    for a in range(0, 30, 2):
        p, q = pts[a], pts[a + 1]
        G = nx.Graph()
        G.add_weighted_edges_from(g.edges)
        for name, (e, s) in (("p", p), ("q", q)):
            u, v, w = g.edges[int(e)]
            G.add_edge(name, u, weight=s)
            G.add_edge(name, v, weight=w - s)
        if int(p[0]) == int(q[0]):
            G.add_edge("p", "q", weight=abs(p[1] - q[1]))
        assert g.distance(p, q) == pytest.approx(nx.dijkstra_path_length(G, "p", "q"), abs=1e-12)


def test_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 1, 1.0),))  # disconnected
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 1, 0.0),))
    with pytest.raises(InvalidPointError):
        SMALL_GRAPH.canonical_point((0, 5.0))  # offset beyond edge weight


def test_graph_vertex_is_canonical_on_smallest_edge():
    g = SMALL_GRAPH
    # vertex 1 is the far end of edge 0 and the near end of edge 1
    assert g.canonical_point((1, 0.0)) == g.vertex(1) == (0.0, 1.0)


def test_euclidean_midpoint():
    assert geodesic_point(EuclideanSpace(2), (0, 0), (2, 0), 0.5) == (1.0, 0.0)


def test_taxicab_geodesic_routes_through_origin():
    # both endpoints are at distance 1 from the midpoint, which is the origin
    space = TaxicabCross()
    mid = geodesic_point(space, (1, 0), (0, 1), 0.5)
    assert mid == (0.0, 0.0)
    assert space.distance((1, 0), mid) == 1.0 and space.distance(mid, (0, 1)) == 1.0
    quarter = geodesic_point(space, (1, 0), (0, 1), 0.25)
    assert quarter == (0.5, 0.0)


def test_taxicab_same_axis_is_segment():
    assert geodesic_point(TaxicabCross(), (-1, 0), (3, 0), 0.25) == (0.0, 0.0)
    assert geodesic_point(TaxicabCross(), (0, 2), (0, 4), 0.5) == (0.0, 3.0)


def test_geodesic_domain_error():
    with pytest.raises(DomainError):
        geodesic_point(EuclideanSpace(1), (0,), (1,), 1.5)


@pytest.mark.parametrize("name", sorted(SPACES))
def test_geodesic_endpoints_exact(name, rng):
    space = SPACES[name]
    P = random_points(space, rng, 20)
    for p, q in zip(P[::2], P[1::2]):
        p, q = space.canonical_point(p), space.canonical_point(q)
        assert space.canonical_point(geodesic_point(space, p, q, 0.0)) == p
        assert space.canonical_point(geodesic_point(space, p, q, 1.0)) == q


@pytest.mark.parametrize("name", sorted(SPACES))
def test_geodesic_constant_speed(name, rng):
    space = SPACES[name]
    P = random_points(space, rng, 20)
    ts = np.linspace(0.0, 1.0, 9)
    for p, q in zip(P[::2], P[1::2]):
        d = space.distance(p, q)
        pts = [geodesic_point(space, p, q, float(t)) for t in ts]
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                got = space.distance(pts[i], pts[j])
                assert got == pytest.approx(abs(ts[j] - ts[i]) * d, abs=1e-9)


@pytest.mark.parametrize("name", sorted(SPACES))
def test_pairwise_matches_scalar_distance_bitwise(name, rng):
    space = SPACES[name]
    P = random_points(space, rng, 12)
    Q = random_points(space, rng, 9)
    D = space.pairwise(P, Q)
    for i, p in enumerate(P):
        for j, q in enumerate(Q):
            assert D[i, j] == space.distance(p, q)


def test_scaled_space_reports_lambda_and_delegates():
    base = EuclideanSpace(2)
    s = ScaledQuasiconvex(base, 1.5)
    assert s.lam == 1.5
    assert s.distance((0, 0), (3, 4)) == 5.0
    assert geodesic_point(s, (0, 0), (2, 0), 0.5) == (1.0, 0.0)
    with pytest.raises(ValueError):
        ScaledQuasiconvex(base, 0.5)


@pytest.mark.parametrize(
    "cfg, kind",
    [
        ("r1", "euclidean"),
        ("r3", "euclidean"),
        ("cross", "taxicab-cross"),
        ({"kind": "graph", "vertices": 2, "edges": [[0, 1, 2.0]]}, "graph"),
        ({"kind": "scaled", "base": "r2", "lambda": 2.0}, "scaled"),
    ],
)
def test_space_from_config(cfg, kind):
    space = space_from_config(cfg)
    assert space.kind == kind
    assert space_from_config(space.to_config()) == space


def test_space_from_config_rejects_unknown():
    with pytest.raises(ValueError):
        space_from_config("hyperbolic")
    with pytest.raises(ValueError):
        space_from_config({"kind": "sphere"})


def test_non_finite_coordinates_rejected():
    with pytest.raises(InvalidPointError):
        ground_distance(EuclideanSpace(1), (math.nan,), (0,))


def test_space_config_names_missing_keys():
    with pytest.raises(ValueError, match="missing vertices"):
        space_from_config({"kind": "graph", "edges": [[0, 1, 1.0]]})
