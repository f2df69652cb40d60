"""Social centrality analysis and experiments for wireless mesh topologies."""

from meshsocial.graph import (
    DistanceMatrix,
    Graph,
    GraphError,
    all_pairs_distances,
    connected_pairs,
    k_hop_neighborhood,
    load_edge_list,
    random_geometric_graph,
    remove_nodes,
)
from meshsocial.centrality import (
    CentralityScores,
    Metric,
    RankedNodes,
    betweenness_centrality,
    closeness_centrality,
    compute,
    degree_centrality,
    eigenvector_centrality,
    rank_nodes,
)

__version__ = "0.1.0"

__all__ = [
    "CentralityScores",
    "DistanceMatrix",
    "Graph",
    "GraphError",
    "Metric",
    "RankedNodes",
    "all_pairs_distances",
    "betweenness_centrality",
    "closeness_centrality",
    "compute",
    "connected_pairs",
    "degree_centrality",
    "eigenvector_centrality",
    "k_hop_neighborhood",
    "load_edge_list",
    "random_geometric_graph",
    "rank_nodes",
    "remove_nodes",
]
