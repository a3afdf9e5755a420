"""splitsim: simulation and verification of distributed splitting problems."""

from ._kernels import backend_name
from .config import DEFAULT_CONFIG, SplitConfig
from .graphs import (
    BipartiteInstance,
    SimGraph,
    Subinstance,
    VirtualNodeMap,
    build_bipartite,
    connected_components,
    girth,
    graph_from_id_edges,
    graph_to_weaksplit_instance,
    split_heavy_left_nodes,
)
from .ledger import RoundLedger
from .types import (
    BLUE,
    RED,
    UNCOLORED,
    EdgeOrientation,
    IndependentSet,
    MultiColoring,
    Partition,
    ProperColoring,
    TwoColoring,
)

__version__ = "0.1.0"

__all__ = [
    "BLUE",
    "BipartiteInstance",
    "DEFAULT_CONFIG",
    "EdgeOrientation",
    "IndependentSet",
    "MultiColoring",
    "Partition",
    "ProperColoring",
    "RED",
    "RoundLedger",
    "SimGraph",
    "SplitConfig",
    "Subinstance",
    "TwoColoring",
    "UNCOLORED",
    "VirtualNodeMap",
    "backend_name",
    "build_bipartite",
    "connected_components",
    "girth",
    "graph_from_id_edges",
    "graph_to_weaksplit_instance",
    "split_heavy_left_nodes",
    "__version__",
]
