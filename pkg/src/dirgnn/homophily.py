"""Homophily metrics for directed graphs, unweighted and operator-weighted.

node_homophily averages, over nodes with at least one out-edge, the fraction
of out-neighbors sharing the node's label.  The weighted variant replaces the
out-neighborhood with any nonnegative operator row: rows with zero mass are
excluded from the average.  Compatibility matrices hold the class-to-class
edge (or mass) distribution, row-normalized where defined.

effective_homophily sweeps the one- and two-hop operator family and reports
the best achievable weighted node homophily separately for the directed and
the symmetrized family, plus the relative gain of directed over symmetrized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoEdgesError, ShapeMismatchError
from .graph import DirectedGraph
from .operators import OperatorKind, two_hop_family
from .sparse import SparseMatrix

DIRECTED_FAMILY = (OperatorKind.A, OperatorKind.AT, OperatorKind.A2,
                   OperatorKind.AT2, OperatorKind.ATA, OperatorKind.AAT)
UNDIRECTED_FAMILY = (OperatorKind.AU, OperatorKind.AU2)


def _check_labels(n: int, labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ShapeMismatchError(f"expected {n} labels, got shape {labels.shape}")
    return labels


def node_homophily(graph: DirectedGraph, labels: np.ndarray) -> float:
    """Mean over nodes with out-degree > 0 of the same-label out-neighbor fraction."""
    labels = _check_labels(graph.num_nodes, labels)
    dout = graph.out_degree()
    if graph.num_edges == 0:
        raise NoEdgesError("node homophily is undefined: no node has an out-edge")
    src = np.repeat(np.arange(graph.num_nodes, dtype=np.int64), dout)
    same = (labels[src] == labels[graph.out_indices]).astype(np.float64)
    same_counts = np.zeros(graph.num_nodes, dtype=np.float64)
    np.add.at(same_counts, src, same)
    keep = dout > 0
    return float(np.mean(same_counts[keep] / dout[keep]))


def edge_homophily(graph: DirectedGraph, labels: np.ndarray) -> float:
    """Fraction of directed edges whose endpoints share a label."""
    labels = _check_labels(graph.num_nodes, labels)
    if graph.num_edges == 0:
        raise NoEdgesError("edge homophily is undefined on an edgeless graph")
    e = graph.edge_array()
    return float(np.mean(labels[e[:, 0]] == labels[e[:, 1]]))


def weighted_node_homophily(op: SparseMatrix, labels: np.ndarray) -> float:
    """Same-label mass fraction per row, averaged over rows with positive sum.

    The operator must be square over the labeled nodes with nonnegative
    entries.  Scaling the operator by any positive constant leaves the value
    unchanged.
    """
    n = op.shape[0]
    if op.shape[0] != op.shape[1]:
        raise ShapeMismatchError(f"operator must be square, got {op.shape}")
    labels = _check_labels(n, labels)
    if np.any(op.data < 0):
        raise ValueError("weighted node homophily requires nonnegative entries")
    rows = op.row_ids()
    same = (labels[rows] == labels[op.indices]).astype(np.float64)
    num = np.bincount(rows, weights=op.data * same, minlength=n)
    den = np.bincount(rows, weights=op.data, minlength=n)
    keep = den > 0
    if not keep.any():
        raise NoEdgesError("weighted node homophily is undefined: all rows are empty")
    return float(np.mean(num[keep] / den[keep]))


@dataclass
class CompatibilityMatrix:
    """Row-stochastic class-to-class distribution; invalid rows are flagged.

    values[k, l] is the probability that an edge (or unit of operator mass)
    leaving class k lands on class l.  Rows of classes with no outgoing mass
    are flagged invalid and left as zeros rather than being filled in.
    """

    values: np.ndarray
    row_valid: np.ndarray

    @property
    def num_classes(self) -> int:
        return int(self.values.shape[0])

    def to_dict(self) -> dict:
        return {
            "values": [[float(v) for v in row] for row in self.values],
            "row_valid": [bool(b) for b in self.row_valid],
        }


def compatibility_matrix(graph: DirectedGraph, labels: np.ndarray,
                         num_classes: int) -> CompatibilityMatrix:
    """Fraction of edges from class k that point into class l."""
    labels = _check_labels(graph.num_nodes, labels)
    if labels.size and labels.max() >= num_classes:
        raise ShapeMismatchError("labels exceed num_classes")
    counts = np.zeros((num_classes, num_classes), dtype=np.float64)
    e = graph.edge_array()
    np.add.at(counts, (labels[e[:, 0]], labels[e[:, 1]]), 1.0)
    return _normalize_rows(counts)


def weighted_compatibility_matrix(op: SparseMatrix, labels: np.ndarray,
                                  num_classes: int) -> CompatibilityMatrix:
    """Class-to-class operator mass, row-normalized per source class."""
    if op.shape[0] != op.shape[1]:
        raise ShapeMismatchError(f"operator must be square, got {op.shape}")
    labels = _check_labels(op.shape[0], labels)
    if labels.size and labels.max() >= num_classes:
        raise ShapeMismatchError("labels exceed num_classes")
    if np.any(op.data < 0):
        raise ValueError("weighted compatibility requires nonnegative entries")
    rows = op.row_ids()
    counts = np.zeros((num_classes, num_classes), dtype=np.float64)
    np.add.at(counts, (labels[rows], labels[op.indices]), op.data)
    return _normalize_rows(counts)


def _normalize_rows(counts: np.ndarray) -> CompatibilityMatrix:
    sums = counts.sum(axis=1)
    valid = sums > 0
    values = np.zeros_like(counts)
    values[valid] = counts[valid] / sums[valid, None]
    return CompatibilityMatrix(values, valid)


@dataclass
class HomophilyReport:
    """Weighted node homophily across the operator family.

    per_operator maps each probed operator to its homophily, or None when the
    operator had no nonzero row.  excluded_nodes counts the rows skipped per
    operator.  h_eff_d / h_eff_u are the family maxima (directed vs
    symmetrized); gain is their relative difference (h_eff_d - h_eff_u) /
    h_eff_u, None when h_eff_u is 0.
    """

    per_operator: dict
    excluded_nodes: dict
    h_eff_d: float
    h_eff_u: float
    gain: float | None

    def to_dict(self) -> dict:
        return {
            "per_operator": {k.value: (None if v is None else float(v))
                             for k, v in self.per_operator.items()},
            "excluded_nodes": {k.value: int(v) for k, v in self.excluded_nodes.items()},
            "h_eff_d": float(self.h_eff_d),
            "h_eff_u": float(self.h_eff_u),
            "gain": None if self.gain is None else float(self.gain),
        }


def effective_homophily(graph: DirectedGraph, labels: np.ndarray) -> HomophilyReport:
    """Best weighted node homophily over the 1- and 2-hop operator families."""
    labels = _check_labels(graph.num_nodes, labels)
    if graph.num_edges == 0:
        raise NoEdgesError("effective homophily is undefined on an edgeless graph")
    per_operator: dict = {}
    excluded: dict = {}
    for kind, op in two_hop_family(graph, directed=True) + two_hop_family(graph, directed=False):
        den_pos = op.row_sums() > 0
        excluded[kind] = int(graph.num_nodes - np.count_nonzero(den_pos))
        per_operator[kind] = (weighted_node_homophily(op, labels)
                              if den_pos.any() else None)
    h_eff_d = max(per_operator[k] for k in DIRECTED_FAMILY if per_operator[k] is not None)
    h_eff_u = max(per_operator[k] for k in UNDIRECTED_FAMILY if per_operator[k] is not None)
    gain = None if h_eff_u == 0 else (h_eff_d - h_eff_u) / h_eff_u
    return HomophilyReport(per_operator, excluded, float(h_eff_d), float(h_eff_u), gain)
