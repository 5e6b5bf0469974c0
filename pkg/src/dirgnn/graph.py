"""Directed graph core: immutable CSR adjacency with its transpose kept in sync.

Node ids are dense 0-based integers.  Edges are stored once per direction,
self-loops are dropped on ingestion and duplicate edges collapse to a single
binary edge.  Both the out-adjacency and the in-adjacency are materialized so
that forward and backward neighborhoods are equally cheap to walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IngestionError, ShapeMismatchError


def _csr_from_pairs(src: np.ndarray, dst: np.ndarray, n: int):
    """Sorted CSR (indptr, indices) over rows `src`, already deduplicated."""
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64, copy=True)


class DirectedGraph:
    """Immutable directed graph over nodes 0..n-1.

    Attributes
    ----------
    num_nodes : int
    num_edges : int  (directed edges after dedup / self-loop removal)
    out_indptr, out_indices : CSR of the adjacency (row i = out-neighbors of i,
        sorted ascending)
    in_indptr, in_indices : CSR of the transposed adjacency (row i =
        in-neighbors of i, sorted ascending)
    """

    __slots__ = ("num_nodes", "num_edges", "out_indptr", "out_indices",
                 "in_indptr", "in_indices")

    def __init__(self, num_nodes, out_indptr, out_indices, in_indptr, in_indices):
        self.num_nodes = int(num_nodes)
        self.num_edges = int(len(out_indices))
        self.out_indptr = out_indptr
        self.out_indices = out_indices
        self.in_indptr = in_indptr
        self.in_indices = in_indices
        for arr in (out_indptr, out_indices, in_indptr, in_indices):
            arr.setflags(write=False)

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_edge_list(edges, num_nodes: int) -> "DirectedGraph":
        """Build a graph from (src, dst) pairs.

        Self-loops are dropped, duplicate pairs collapse to one edge.  Any
        endpoint outside [0, num_nodes) raises IngestionError naming the
        offending entry.
        """
        n = int(num_nodes)
        if n < 0:
            raise IngestionError(f"num_nodes must be >= 0, got {num_nodes}")
        pairs = np.asarray(list(edges), dtype=np.int64)
        if pairs.size == 0:
            pairs = pairs.reshape(0, 2)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise IngestionError("edge list must be a sequence of (src, dst) pairs")
        src, dst = pairs[:, 0], pairs[:, 1]
        bad = (src < 0) | (src >= n) | (dst < 0) | (dst >= n)
        if bad.any():
            k = int(np.argmax(bad))
            raise IngestionError(
                f"edge entry {k}: ({src[k]}, {dst[k]}) is outside node range [0, {n})")
        keep = src != dst
        src, dst = src[keep], dst[keep]
        # dedup via encoded keys; order-insensitive by construction
        key = src * n + dst
        key = np.unique(key)
        src = key // n
        dst = key % n
        out_indptr, out_indices = _csr_from_pairs(src, dst, n)
        in_indptr, in_indices = _csr_from_pairs(dst, src, n)
        return DirectedGraph(n, out_indptr, out_indices, in_indptr, in_indices)

    # -- basic accessors ---------------------------------------------------

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[i]:self.in_indptr[i + 1]]

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) array sorted by (src, dst)."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.out_degree())
        return np.column_stack([src, self.out_indices])

    def has_edge(self, i: int, j: int) -> bool:
        nbrs = self.out_neighbors(i)
        k = np.searchsorted(nbrs, j)
        return bool(k < len(nbrs) and nbrs[k] == j)

    # -- derived graphs ----------------------------------------------------

    def transpose(self) -> "DirectedGraph":
        """Graph with every edge reversed.  An involution."""
        return DirectedGraph(self.num_nodes,
                             self.in_indptr, self.in_indices,
                             self.out_indptr, self.out_indices)

    def to_undirected(self) -> "DirectedGraph":
        """Symmetrized graph: edge {i, j} kept once per direction.

        The result is its own transpose; bidirectional pairs in the input do
        not double up.
        """
        e = self.edge_array()
        both = np.concatenate([e, e[:, ::-1]], axis=0)
        return DirectedGraph.from_edge_list(both, self.num_nodes)

    def is_symmetric(self) -> bool:
        return (len(self.out_indices) == len(self.in_indices)
                and np.array_equal(self.out_indptr, self.in_indptr)
                and np.array_equal(self.out_indices, self.in_indices))

    def __repr__(self):
        return f"DirectedGraph(n={self.num_nodes}, m={self.num_edges})"


@dataclass
class StatsReport:
    """Structural summary of a directed graph, percentages in [0, 100]."""

    num_nodes: int
    num_edges: int
    pct_zero_in: float
    pct_zero_out: float
    pct_zero_total: float
    pct_unidirectional: float
    no_edges: bool

    def to_dict(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "num_edges": self.num_edges,
            "pct_zero_in": self.pct_zero_in,
            "pct_zero_out": self.pct_zero_out,
            "pct_zero_total": self.pct_zero_total,
            "pct_unidirectional": self.pct_unidirectional,
            "no_edges": self.no_edges,
        }


def structural_stats(graph: DirectedGraph) -> StatsReport:
    """Degree-zero percentages and the share of one-way edges.

    pct_unidirectional is the fraction of directed edges (i, j) whose reverse
    (j, i) is absent.  An empty graph reports 0 with no_edges=True.
    """
    n = graph.num_nodes
    din = graph.in_degree()
    dout = graph.out_degree()
    if n == 0:
        return StatsReport(0, 0, 0.0, 0.0, 0.0, 0.0, True)
    pct_zero_in = 100.0 * np.count_nonzero(din == 0) / n
    pct_zero_out = 100.0 * np.count_nonzero(dout == 0) / n
    pct_zero_total = 100.0 * np.count_nonzero((din == 0) & (dout == 0)) / n
    m = graph.num_edges
    if m == 0:
        return StatsReport(n, 0, pct_zero_in, pct_zero_out, pct_zero_total, 0.0, True)
    e = graph.edge_array()
    key_fwd = e[:, 0] * n + e[:, 1]
    key_bwd = e[:, 1] * n + e[:, 0]
    has_reverse = np.isin(key_bwd, key_fwd)
    pct_uni = 100.0 * np.count_nonzero(~has_reverse) / m
    return StatsReport(n, m, pct_zero_in, pct_zero_out, pct_zero_total, pct_uni, False)


@dataclass
class LabeledNodes:
    """Per-node class labels, and optionally a dense feature matrix.

    labels[i] in [0, num_classes); features row i belongs to node i.
    """

    labels: np.ndarray
    num_classes: int
    features: np.ndarray | None = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 1:
            raise IngestionError("labels must be a 1-d integer array")
        if self.num_classes <= 0:
            raise IngestionError(f"num_classes must be positive, got {self.num_classes}")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise IngestionError(
                f"labels must lie in [0, {self.num_classes}), "
                f"found range [{self.labels.min()}, {self.labels.max()}]")
        if self.features is not None:
            self.features = np.asarray(self.features, dtype=np.float64)
            if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
                raise IngestionError(
                    f"features must be 2-d with one row per node "
                    f"({self.labels.shape[0]}), got shape {self.features.shape}")

    @property
    def num_nodes(self) -> int:
        return int(self.labels.shape[0])


def check_alignment(graph: DirectedGraph, data: LabeledNodes) -> None:
    """Raise if labels/features do not cover exactly the graph's nodes."""
    if data.num_nodes != graph.num_nodes:
        raise ShapeMismatchError(
            f"graph has {graph.num_nodes} nodes but labels cover {data.num_nodes}")
