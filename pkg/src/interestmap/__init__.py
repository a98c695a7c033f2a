"""Interest maps from actor/forum activity logs.

Pipeline: threshold raw activity into a bipartite graph, project it onto
forums, keep the statistically significant backbone, detect meta-communities,
measure the network, and serve an explorable map with same-community
recommendations.
"""

from .atlas import (
    InterestMap,
    Recommendation,
    build_map,
    export_map,
    import_map,
    layout,
    recommend,
)
from .backbone import (
    BackboneGraph,
    EdgeSignificance,
    SweepResult,
    edge_significance,
    extract_backbone,
    sweep,
)
from .community import CommunityAssignment, louvain, modularity
from .graphcore import (
    NodeStats,
    WeightedGraph,
    largest_component,
    load_edgelist,
    node_stats,
    project,
    save_edgelist,
)
from .ingest import (
    ActivityRecord,
    BipartiteGraph,
    IngestConfig,
    build_bipartite,
    fetch_dataset,
    load_activity,
)
from .metrics import (
    ErBaseline,
    NetworkStats,
    avg_shortest_path,
    clustering,
    er_random,
    fit_power_law,
    network_stats,
    pagerank,
    power_law_fit,
    small_worldness,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityRecord",
    "BackboneGraph",
    "BipartiteGraph",
    "CommunityAssignment",
    "EdgeSignificance",
    "ErBaseline",
    "IngestConfig",
    "InterestMap",
    "NetworkStats",
    "NodeStats",
    "Recommendation",
    "SweepResult",
    "WeightedGraph",
    "avg_shortest_path",
    "build_bipartite",
    "build_map",
    "clustering",
    "edge_significance",
    "er_random",
    "export_map",
    "extract_backbone",
    "fetch_dataset",
    "fit_power_law",
    "import_map",
    "largest_component",
    "layout",
    "load_activity",
    "load_edgelist",
    "louvain",
    "modularity",
    "network_stats",
    "node_stats",
    "pagerank",
    "power_law_fit",
    "project",
    "recommend",
    "save_edgelist",
    "small_worldness",
    "sweep",
]
