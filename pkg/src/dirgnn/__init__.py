"""Directed-graph homophily analysis and direction-aware message passing.

The package measures how much class signal the two directions of a digraph
carry (homophily metrics over one- and two-hop diffusion operators), provides
message-passing layers that keep the directions separate, a deterministic
full-batch trainer, synthetic generators whose labels are only recoverable
with directional information, and color-refinement tooling that compares the
discriminative power of directed and symmetrized refinement.
"""

from .errors import (DirgnnError, IngestionError, NoEdgesError, NumericError,
                     ShapeMismatchError, TrainingError)
from .estimator import DirGNNClassifier
from .graph import DirectedGraph, LabeledNodes, StatsReport, structural_stats
from .homophily import (CompatibilityMatrix, HomophilyReport, compatibility_matrix,
                        edge_homophily, effective_homophily, node_homophily,
                        weighted_compatibility_matrix, weighted_node_homophily)
from .nn import DirLayerParams, DirModel, ModelConfig, build_operators
from .operators import (OperatorKind, adjacency, adjacency_transpose,
                        adjacency_undirected, build_operator, gcn_normalize_fwd,
                        gcn_normalize_sym, row_normalize, symmetrized_average,
                        two_hop_family)
from .sparse import SparseMatrix, spgemm, spmm
from .synth import (DirectionTaskConfig, PAConfig, direction_task,
                    preferential_attachment, target_compatibility)
from .training import (Adam, RunResult, TrainConfig, accuracy, random_split,
                       repeat_train, train)
from .wl import (Coloring, GraphPairFixture, PairResult, canonical_form,
                 compare_pair, direction_blind_pair, distinguishes,
                 nonisomorphic_digraphs, out_blind_pair, refine, refines,
                 search_counterexamples)

__version__ = "0.1.0"

__all__ = [
    "Adam", "Coloring", "CompatibilityMatrix", "DirGNNClassifier",
    "DirLayerParams", "DirModel", "DirectedGraph", "DirectionTaskConfig",
    "DirgnnError", "GraphPairFixture", "HomophilyReport", "IngestionError",
    "LabeledNodes", "ModelConfig", "NoEdgesError", "NumericError",
    "OperatorKind", "PAConfig", "PairResult", "RunResult", "ShapeMismatchError",
    "SparseMatrix", "StatsReport", "TrainConfig", "TrainingError", "accuracy",
    "adjacency", "adjacency_transpose", "adjacency_undirected",
    "build_operator", "build_operators", "canonical_form", "compare_pair",
    "compatibility_matrix", "direction_blind_pair", "direction_task",
    "distinguishes", "edge_homophily", "effective_homophily",
    "gcn_normalize_fwd", "gcn_normalize_sym", "node_homophily",
    "nonisomorphic_digraphs", "out_blind_pair", "preferential_attachment",
    "random_split", "refine", "refines", "repeat_train", "row_normalize",
    "search_counterexamples", "spgemm", "spmm", "structural_stats",
    "symmetrized_average", "target_compatibility", "train", "two_hop_family",
    "weighted_compatibility_matrix", "weighted_node_homophily",
]
