"""Temporal-hypergraph node classification for discrete dynamic graphs.

The pipeline: a per-snapshot GNN backbone produces node embeddings, temporal
K-nearest-neighbour hyperedges connect each node to similar nodes in nearby
snapshots at three time scales, class prototypes form a parallel group-level
hypergraph during training, and a weighted hypergraph propagation layer with
per-edge attention refines the embeddings before classification.
"""

__version__ = "0.1.0"
