import json
import math
from collections import deque

import pytest

from ttroute.topo_map import (
    Edge,
    MapFormatError,
    MapValidationError,
    MissingEdgeError,
    Node,
    NodeKind,
    TopologyMap,
    builtin_map,
    default_map,
    heuristic_cost,
    load_map,
    save_map,
)


def triangle_map() -> TopologyMap:
    nodes = (
        Node(0, 0.0, 0.0, NodeKind.PORT),
        Node(1, 3.0, 0.0, NodeKind.PORT),
        Node(2, 3.0, 4.0, NodeKind.PORT),
    )
    edges = (
        Edge(0, 1, 3.0, 0),
        Edge(1, 2, 4.0, 0),
        Edge(0, 2, 5.0, 0),
    )
    return TopologyMap(nodes=nodes, edges=edges, name="triangle", seed=0)


def bfs_reaches_all(topo: TopologyMap) -> bool:
    reached = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in topo.neighbors(u):
            if v not in reached:
                reached.add(v)
                queue.append(v)
    return len(reached) == topo.node_count


def test_triangle_file_loads(tmp_path):
    path = tmp_path / "tri.json"
    save_map(triangle_map(), path)
    topo = load_map(path)
    assert topo.node_count == 3
    assert topo.edge_count == 3


def test_zero_length_edge_rejected():
    nodes = (Node(0, 0.0, 0.0, NodeKind.PORT), Node(1, 1.0, 0.0, NodeKind.PORT))
    with pytest.raises(MapValidationError):
        TopologyMap(nodes=nodes, edges=(Edge(0, 1, 0.0, 0),))


def test_self_loop_rejected():
    nodes = (Node(0, 0.0, 0.0, NodeKind.PORT), Node(1, 1.0, 0.0, NodeKind.PORT))
    with pytest.raises(MapValidationError):
        TopologyMap(nodes=nodes, edges=(Edge(0, 0, 1.0, 0), Edge(0, 1, 1.0, 0)))


def test_duplicate_edge_rejected():
    nodes = (Node(0, 0.0, 0.0, NodeKind.PORT), Node(1, 1.0, 0.0, NodeKind.PORT))
    with pytest.raises(MapValidationError):
        TopologyMap(
            nodes=nodes, edges=(Edge(0, 1, 1.0, 0), Edge(1, 0, 2.0, 0))
        )


def test_disconnected_rejected():
    nodes = tuple(Node(i, float(i), 0.0, NodeKind.PORT) for i in range(4))
    with pytest.raises(MapValidationError, match="disconnected"):
        TopologyMap(nodes=nodes, edges=(Edge(0, 1, 1.0, 0), Edge(2, 3, 1.0, 0)))


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MapFormatError):
        load_map(path)
    path.write_text(json.dumps({"nodes": [{"id": 0}]}))
    with pytest.raises(MapFormatError):
        load_map(path)


def test_builtin_map_2_round_trip(tmp_path):
    topo = default_map(2)
    path = tmp_path / "map2.json"
    save_map(topo, path)
    again = load_map(path)
    assert again.nodes == topo.nodes
    assert again.edges == topo.edges
    assert again.name == topo.name
    assert again.seed == topo.seed


@pytest.mark.parametrize("family", ["winding_racks", "random_racks", "hub"])
def test_builtin_deterministic(family):
    a = builtin_map(family, seed=7)
    b = builtin_map(family, seed=7)
    assert a.nodes == b.nodes
    assert a.edges == b.edges


def test_random_racks_seeds_differ_but_connected():
    a = builtin_map("random_racks", seed=1)
    b = builtin_map("random_racks", seed=2)
    assert a.nodes != b.nodes or a.edges != b.edges
    assert bfs_reaches_all(a)
    assert bfs_reaches_all(b)


def test_hub_center_has_max_degree():
    topo = builtin_map("hub", seed=5, spokes=4)
    degree = [0] * topo.node_count
    for e in topo.edges:
        degree[e.u] += 1
        degree[e.v] += 1
    assert degree[0] == max(degree)
    assert degree[0] == 4


@pytest.mark.parametrize("index", [1, 2, 3])
def test_default_maps_connected_and_sized(index):
    topo = default_map(index)
    assert bfs_reaches_all(topo)
    assert 30 <= topo.node_count <= 60
    assert len(topo.zone_ids()) >= 2
    assert len(topo.port_ids()) >= 4


def test_builtin_invalid_params():
    with pytest.raises(ValueError):
        builtin_map("winding_racks", seed=0, rows=1)
    with pytest.raises(ValueError):
        builtin_map("hub", seed=0, spokes=2)
    with pytest.raises(ValueError):
        builtin_map("no_such_family", seed=0)


def test_heuristic_cost_345_triangle():
    topo = triangle_map()
    assert heuristic_cost(topo, 0, 2, nominal_speed=1.0) == pytest.approx(5.0)
    assert heuristic_cost(topo, 0, 1, nominal_speed=2.0) == pytest.approx(1.5)


def test_heuristic_cost_missing_edge():
    topo = default_map(1)
    u = 0
    non_neighbor = next(
        v for v in range(topo.node_count) if v != u and v not in topo.neighbors(u)
    )
    with pytest.raises(MissingEdgeError):
        heuristic_cost(topo, u, non_neighbor)
    with pytest.raises(MissingEdgeError):
        heuristic_cost(topo, u, u)


def test_heuristic_cost_repeated_calls_identical():
    topo = triangle_map()
    values = {heuristic_cost(topo, 1, 2) for _ in range(100)}
    assert len(values) == 1


def test_heuristic_cost_symmetric():
    topo = default_map(3)
    for e in topo.edges:
        assert heuristic_cost(topo, e.u, e.v) == heuristic_cost(topo, e.v, e.u)


def test_heuristic_triangle_inequality_on_triangles():
    topo = triangle_map()
    ab = heuristic_cost(topo, 0, 1)
    bc = heuristic_cost(topo, 1, 2)
    ac = heuristic_cost(topo, 0, 2)
    assert ac <= ab + bc + 1e-12


def test_edge_length_at_least_euclidean():
    for index in (1, 2, 3):
        topo = default_map(index)
        for e in topo.edges:
            assert e.length >= topo.euclidean_distance(e.u, e.v) - 1e-9


def test_every_zone_level_assignable():
    topo = default_map(1)
    for e in topo.edges:
        assert 0 <= e.zone_id < 6
