"""Online travel-time estimation and battery-aware route planning."""

__version__ = "0.1.0"

from .topo_map import (
    Edge,
    Node,
    NodeKind,
    TopologyMap,
    builtin_map,
    default_map,
    heuristic_cost,
    load_map,
    save_map,
)

__all__ = [
    "Edge",
    "Node",
    "NodeKind",
    "TopologyMap",
    "builtin_map",
    "default_map",
    "heuristic_cost",
    "load_map",
    "save_map",
    "__version__",
]
