"""Warehouse floor topology maps.

A floor is a connected undirected graph: nodes are ports (pick/drop spots,
dead ends, rack access points) and bifurcations (junctions), edges are
traversable aisle segments. Edge ``length`` is the distance actually driven
along the aisle, which for winding aisles exceeds the straight-line distance
between its endpoints - that gap is exactly what distance-based heuristic
costs cannot see.

Three builtin generator families mirror common warehouse layouts: winding
rack rows, randomly placed racks, and racks organized around a hub.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

MAP_FAMILIES = ("winding_racks", "random_racks", "hub")

#: zone grid used for rectangular binning of edge midpoints (cols, rows)
ZONE_GRID = (3, 2)


class MapFormatError(ValueError):
    """Raised when a map file cannot be parsed into the map schema."""


class MapValidationError(ValueError):
    """Raised when map content violates a structural invariant."""


class MissingEdgeError(KeyError):
    """Raised when an operation references an edge not present in the map."""


class NodeKind(str, Enum):
    PORT = "port"
    BIFURCATION = "bifurcation"


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    kind: NodeKind


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    length: float
    zone_id: int

    def key(self) -> tuple[int, int]:
        """Canonical undirected key (smaller id first)."""
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


def edge_key(u: int, v: int) -> tuple[int, int]:
    """Canonical undirected key for the node pair (u, v)."""
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class TopologyMap:
    """Immutable floor graph. Safe to share across concurrent workers."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    name: str = "map"
    seed: int | None = None
    # derived lookups, filled in __post_init__
    _adjacency: dict[int, tuple[int, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )
    _edge_lookup: dict[tuple[int, int], Edge] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        adjacency: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        lookup: dict[tuple[int, int], Edge] = {}
        for e in self.edges:
            lookup[e.key()] = e
            adjacency[e.u].append(e.v)
            adjacency[e.v].append(e.u)
        object.__setattr__(
            self,
            "_adjacency",
            {nid: tuple(sorted(nbrs)) for nid, nbrs in adjacency.items()},
        )
        object.__setattr__(self, "_edge_lookup", lookup)
        self.validate()

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def neighbors(self, node_id: int) -> tuple[int, ...]:
        """Neighbor ids of ``node_id`` in ascending order."""
        return self._adjacency[node_id]

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self._edge_lookup

    def edge_between(self, u: int, v: int) -> Edge:
        try:
            return self._edge_lookup[edge_key(u, v)]
        except KeyError:
            raise MissingEdgeError(f"no edge between nodes {u} and {v}") from None

    def euclidean_distance(self, u: int, v: int) -> float:
        a, b = self.nodes[u], self.nodes[v]
        return math.hypot(a.x - b.x, a.y - b.y)

    def zone_ids(self) -> tuple[int, ...]:
        return tuple(sorted({e.zone_id for e in self.edges}))

    def edges_in_zone(self, zone_id: int) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.zone_id == zone_id)

    def port_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.kind is NodeKind.PORT)

    def validate(self) -> None:
        """Check all structural invariants; raise MapValidationError on the first hit."""
        if not self.nodes:
            raise MapValidationError("map has no nodes")
        ids = [n.id for n in self.nodes]
        if ids != list(range(len(ids))):
            raise MapValidationError("node ids must be dense 0..n-1 in order")
        for n in self.nodes:
            if not (math.isfinite(n.x) and math.isfinite(n.y)):
                raise MapValidationError(f"node {n.id} has non-finite coordinates")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            if e.u == e.v:
                raise MapValidationError(f"self-loop on node {e.u}")
            if not (0 <= e.u < len(ids) and 0 <= e.v < len(ids)):
                raise MapValidationError(f"edge ({e.u},{e.v}) references unknown node")
            if not (e.length > 0 and math.isfinite(e.length)):
                raise MapValidationError(
                    f"edge ({e.u},{e.v}) has non-positive length {e.length}"
                )
            k = e.key()
            if k in seen:
                raise MapValidationError(f"duplicate edge {k}")
            seen.add(k)
        if len(self.nodes) > 1:
            self._check_connected()

    def _check_connected(self) -> None:
        reached = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self._adjacency[u]:
                if v not in reached:
                    reached.add(v)
                    queue.append(v)
        if len(reached) != len(self.nodes):
            missing = sorted(set(range(len(self.nodes))) - reached)
            raise MapValidationError(f"graph disconnected; unreachable nodes {missing}")

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"id": n.id, "x": n.x, "y": n.y, "kind": n.kind.value}
                for n in self.nodes
            ],
            "edges": [
                {"from": e.u, "to": e.v, "length": e.length, "zone_id": e.zone_id}
                for e in self.edges
            ],
            "meta": {"name": self.name, "seed": self.seed},
        }

    @classmethod
    def from_dict(cls, data: dict) -> TopologyMap:
        try:
            nodes = tuple(
                Node(int(n["id"]), float(n["x"]), float(n["y"]), NodeKind(n["kind"]))
                for n in data["nodes"]
            )
            edges = tuple(
                Edge(int(e["from"]), int(e["to"]), float(e["length"]), int(e["zone_id"]))
                for e in data["edges"]
            )
            meta = data.get("meta", {})
            name = str(meta.get("name", "map"))
            seed = meta.get("seed")
        except (KeyError, TypeError, ValueError) as exc:
            raise MapFormatError(f"malformed map data: {exc}") from exc
        return cls(nodes=nodes, edges=edges, name=name, seed=seed)


def load_map(path: str | Path) -> TopologyMap:
    """Load and validate a map file (JSON, see TopologyMap.to_dict for the schema)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MapFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MapFormatError(f"{path}: top level must be an object")
    return TopologyMap.from_dict(data)


def save_map(topo: TopologyMap, path: str | Path) -> None:
    Path(path).write_text(json.dumps(topo.to_dict(), indent=2) + "\n")


def heuristic_cost(
    topo: TopologyMap, u: int, v: int, nominal_speed: float = 1.0
) -> float:
    """Distance-based edge weight: straight-line distance / nominal speed.

    Time-invariant by construction; repeated calls always return the same
    value. Raises MissingEdgeError if (u, v) is not an edge of the map.
    """
    if nominal_speed <= 0:
        raise ValueError(f"nominal_speed must be > 0, got {nominal_speed}")
    topo.edge_between(u, v)  # existence check
    return topo.euclidean_distance(u, v) / nominal_speed


# ---------------------------------------------------------------------------
# builtin generator families
# ---------------------------------------------------------------------------


def builtin_map(family: str, seed: int, **params) -> TopologyMap:
    """Generate one of the builtin map families, deterministically per seed.

    Families: ``winding_racks`` (rows >= 2, cols >= 3), ``random_racks``
    (n_nodes >= 8), ``hub`` (spokes >= 3, nodes_per_spoke >= 2).
    """
    if family == "winding_racks":
        return winding_racks_map(seed=seed, **params)
    if family == "random_racks":
        return random_racks_map(seed=seed, **params)
    if family == "hub":
        return hub_map(seed=seed, **params)
    raise ValueError(f"unknown map family {family!r}; expected one of {MAP_FAMILIES}")


def default_map(index: int) -> TopologyMap:
    """The three stock maps used throughout the experiment suite."""
    if index == 1:
        return winding_racks_map(rows=4, cols=8, seed=101)
    if index == 2:
        return random_racks_map(n_nodes=40, seed=202)
    if index == 3:
        return hub_map(spokes=6, nodes_per_spoke=5, seed=303)
    raise ValueError(f"default map index must be 1, 2 or 3, got {index}")


def _assign_zone(
    x: float, y: float, bbox: tuple[float, float, float, float]
) -> int:
    """Rectangular binning of a point into the ZONE_GRID over the bounding box."""
    x0, y0, x1, y1 = bbox
    cols, rows = ZONE_GRID
    # guard degenerate extents; points on the top/right border fall in the last bin
    span_x = max(x1 - x0, 1e-9)
    span_y = max(y1 - y0, 1e-9)
    cx = min(int((x - x0) / span_x * cols), cols - 1)
    cy = min(int((y - y0) / span_y * rows), rows - 1)
    return cy * cols + cx


def _finalize(
    name: str,
    seed: int,
    coords: list[tuple[float, float]],
    raw_edges: list[tuple[int, int, float]],
) -> TopologyMap:
    """Assign kinds (junction vs port) and zones, then build the validated map."""
    degree = [0] * len(coords)
    for u, v, _ in raw_edges:
        degree[u] += 1
        degree[v] += 1
    nodes = tuple(
        Node(
            i,
            x,
            y,
            NodeKind.BIFURCATION if degree[i] >= 3 else NodeKind.PORT,
        )
        for i, (x, y) in enumerate(coords)
    )
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    bbox = (min(xs), min(ys), max(xs), max(ys))
    edges = tuple(
        Edge(
            *edge_key(u, v),
            length=length,
            zone_id=_assign_zone(
                (coords[u][0] + coords[v][0]) / 2.0,
                (coords[u][1] + coords[v][1]) / 2.0,
                bbox,
            ),
        )
        for u, v, length in raw_edges
    )
    return TopologyMap(nodes=nodes, edges=edges, name=name, seed=seed)


def winding_racks_map(rows: int = 4, cols: int = 8, seed: int = 0) -> TopologyMap:
    """Long rack rows with winding aisles between them.

    Aisle segments along a rack row curve around rack footprints, so their
    driven length runs 15-50% over the straight line. Cross-overs between
    rows sit at alternating ends plus a couple of seeded interior columns,
    which keeps alternative routes available.
    """
    if rows < 2:
        raise ValueError(f"winding_racks needs rows >= 2, got {rows}")
    if cols < 3:
        raise ValueError(f"winding_racks needs cols >= 3, got {cols}")
    rng = np.random.default_rng(seed)
    dx, dy = 5.0, 4.5
    coords: list[tuple[float, float]] = []
    for i in range(rows + 1):
        for j in range(cols):
            jx = rng.uniform(-0.4, 0.4)
            jy = rng.uniform(-0.3, 0.3)
            coords.append((j * dx + jx, i * dy + jy))

    def nid(i: int, j: int) -> int:
        return i * cols + j

    def euclid(a: int, b: int) -> float:
        return math.hypot(coords[a][0] - coords[b][0], coords[a][1] - coords[b][1])

    raw: list[tuple[int, int, float]] = []
    for i in range(rows + 1):
        interior = 0 < i < rows
        for j in range(cols - 1):
            wind = rng.uniform(1.15, 1.5) if interior else rng.uniform(1.0, 1.15)
            a, b = nid(i, j), nid(i, j + 1)
            raw.append((a, b, euclid(a, b) * wind))
    for i in range(rows):
        end_col = 0 if i % 2 == 0 else cols - 1
        a, b = nid(i, end_col), nid(i + 1, end_col)
        raw.append((a, b, euclid(a, b) * rng.uniform(1.0, 1.1)))
        extra_cols = rng.choice(
            np.arange(1, cols - 1), size=min(2, cols - 2), replace=False
        )
        for j in sorted(int(c) for c in extra_cols):
            a, b = nid(i, j), nid(i + 1, j)
            raw.append((a, b, euclid(a, b) * rng.uniform(1.0, 1.15)))
    return _finalize(f"winding_racks_r{rows}c{cols}", seed, coords, raw)


def random_racks_map(n_nodes: int = 40, seed: int = 0) -> TopologyMap:
    """Randomly placed racks: scattered junctions joined to near neighbors."""
    if n_nodes < 8:
        raise ValueError(f"random_racks needs n_nodes >= 8, got {n_nodes}")
    rng = np.random.default_rng(seed)
    width, height, min_sep = 40.0, 25.0, 3.0
    coords: list[tuple[float, float]] = []
    attempts = 0
    while len(coords) < n_nodes:
        attempts += 1
        if attempts > 20000:
            raise ValueError("could not place nodes with the required separation")
        x = rng.uniform(1.0, width - 1.0)
        y = rng.uniform(1.0, height - 1.0)
        if all(math.hypot(x - cx, y - cy) >= min_sep for cx, cy in coords):
            coords.append((x, y))

    def euclid(a: int, b: int) -> float:
        return math.hypot(coords[a][0] - coords[b][0], coords[a][1] - coords[b][1])

    pairs: set[tuple[int, int]] = set()
    for a in range(n_nodes):
        by_dist = sorted(
            (b for b in range(n_nodes) if b != a), key=lambda b: (euclid(a, b), b)
        )
        for b in by_dist[:2]:
            pairs.add(edge_key(a, b))

    # union-find to stitch stray clusters together through their closest pair
    parent = list(range(n_nodes))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        parent[find(a)] = find(b)

    for a, b in pairs:
        union(a, b)
    while True:
        roots = {find(a) for a in range(n_nodes)}
        if len(roots) == 1:
            break
        best: tuple[float, int, int] | None = None
        for a in range(n_nodes):
            for b in range(a + 1, n_nodes):
                if find(a) != find(b):
                    d = euclid(a, b)
                    if best is None or (d, a, b) < best:
                        best = (d, a, b)
        assert best is not None
        _, a, b = best
        pairs.add(edge_key(a, b))
        union(a, b)

    # a few extra shortcuts so the planner has real choices
    candidates = sorted(
        (
            (euclid(a, b), a, b)
            for a in range(n_nodes)
            for b in range(a + 1, n_nodes)
            if edge_key(a, b) not in pairs
        ),
    )
    for _, a, b in candidates[: n_nodes // 4]:
        pairs.add(edge_key(a, b))

    raw = [
        (a, b, euclid(a, b) * rng.uniform(1.05, 1.35)) for a, b in sorted(pairs)
    ]
    return _finalize(f"random_racks_n{n_nodes}", seed, coords, raw)


def hub_map(spokes: int = 6, nodes_per_spoke: int = 5, seed: int = 0) -> TopologyMap:
    """Racks organized in a hub: radial spokes plus a rim between spoke tips."""
    if spokes < 3:
        raise ValueError(f"hub needs spokes >= 3, got {spokes}")
    if nodes_per_spoke < 2:
        raise ValueError(f"hub needs nodes_per_spoke >= 2, got {nodes_per_spoke}")
    rng = np.random.default_rng(seed)
    cx, cy, step = 20.0, 12.5, 3.2
    coords: list[tuple[float, float]] = [(cx, cy)]
    spoke_nodes: list[list[int]] = []
    for s in range(spokes):
        angle = 2.0 * math.pi * s / spokes + rng.uniform(-0.06, 0.06)
        chain: list[int] = []
        for t in range(nodes_per_spoke):
            r = (t + 1) * step * rng.uniform(0.95, 1.1)
            coords.append((cx + r * math.cos(angle), cy + r * math.sin(angle)))
            chain.append(len(coords) - 1)
        spoke_nodes.append(chain)

    def euclid(a: int, b: int) -> float:
        return math.hypot(coords[a][0] - coords[b][0], coords[a][1] - coords[b][1])

    raw: list[tuple[int, int, float]] = []
    for chain in spoke_nodes:
        prev = 0
        for node in chain:
            raw.append((prev, node, euclid(prev, node) * rng.uniform(1.0, 1.2)))
            prev = node
    tips = [chain[-1] for chain in spoke_nodes]
    for s in range(spokes):
        a, b = tips[s], tips[(s + 1) % spokes]
        raw.append((a, b, euclid(a, b) * rng.uniform(1.05, 1.3)))
    if spokes >= 6 and nodes_per_spoke >= 3:
        mids = [chain[nodes_per_spoke // 2] for chain in spoke_nodes]
        for s in range(spokes):
            a, b = mids[s], mids[(s + 1) % spokes]
            raw.append((a, b, euclid(a, b) * rng.uniform(1.05, 1.3)))
    return _finalize(f"hub_s{spokes}p{nodes_per_spoke}", seed, coords, raw)
