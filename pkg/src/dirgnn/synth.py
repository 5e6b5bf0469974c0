"""Synthetic graph generators.

preferential_attachment grows a directed graph where each arriving node picks
out-edges among existing nodes with probability proportional to
(in_degree + 1) * compat[new_label, old_label].  The +1 keeps weights
positive before any edge exists; sampling is without replacement, so there
are no duplicate edges, and since edges always point from newer to older
nodes there are no bidirectional pairs and no cycles.

direction_task builds a sparse random digraph with scalar uniform features
whose label asks which side of a node is larger: 1 iff the mean feature over
in-neighbors strictly exceeds the mean over out-neighbors (empty
neighborhoods count as mean 0).  Solvable only by models that separate the
two directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import DirectedGraph, LabeledNodes


def target_compatibility(h: float, num_classes: int) -> np.ndarray:
    """Row-stochastic class compatibility with h on the diagonal."""
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"target homophily must lie in [0, 1], got {h}")
    if num_classes < 1:
        raise ValueError("num_classes must be >= 1")
    if num_classes == 1:
        return np.ones((1, 1), dtype=np.float64)
    off = (1.0 - h) / (num_classes - 1)
    mat = np.full((num_classes, num_classes), off, dtype=np.float64)
    np.fill_diagonal(mat, h)
    return mat


@dataclass
class PAConfig:
    num_nodes: int = 1000
    num_classes: int = 5
    m: int = 2
    compat: np.ndarray = field(default_factory=lambda: target_compatibility(0.5, 5))
    seed: int = 0

    def __post_init__(self):
        self.compat = np.asarray(self.compat, dtype=np.float64)
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.num_nodes <= self.m:
            raise ValueError("need more nodes than the seed set")
        if self.compat.shape != (self.num_classes, self.num_classes):
            raise ValueError(
                f"compat must be {self.num_classes}x{self.num_classes}, got {self.compat.shape}")
        if np.any(self.compat < 0) or not np.allclose(self.compat.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("compat rows must be nonnegative and sum to 1")


def preferential_attachment(cfg: PAConfig) -> tuple[DirectedGraph, LabeledNodes]:
    """Grow a citation-style digraph with label-aware preferential attachment.

    The first m nodes form the seed set and get no out-edges.  Every later
    node v draws m distinct targets among nodes 0..v-1 with weight
    (in_degree + 1) * compat[label_v, label_target]; if the compatibility row
    zeroes out every remaining candidate, the remaining draws fall back to
    uniform over untouched candidates so v still emits exactly m edges.
    """
    rng = np.random.default_rng(cfg.seed)
    n, m, c = cfg.num_nodes, cfg.m, cfg.num_classes
    labels = rng.integers(0, c, size=n)
    in_deg = np.zeros(n, dtype=np.float64)
    src = np.empty((n - m) * m, dtype=np.int64)
    dst = np.empty((n - m) * m, dtype=np.int64)
    k = 0
    for v in range(m, n):
        w = (in_deg[:v] + 1.0) * cfg.compat[labels[v], labels[:v]]
        chosen = np.zeros(v, dtype=bool)
        for _ in range(m):
            total = w.sum()
            if total > 0:
                t = int(rng.choice(v, p=w / total))
            else:
                t = int(rng.choice(np.flatnonzero(~chosen)))
            src[k] = v
            dst[k] = t
            k += 1
            in_deg[t] += 1.0
            chosen[t] = True
            w[t] = 0.0
    graph = DirectedGraph.from_edge_list(np.column_stack([src, dst]), n)
    return graph, LabeledNodes(labels, c)


@dataclass
class DirectionTaskConfig:
    num_nodes: int = 5000
    p: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.num_nodes < 2:
            raise ValueError("need at least 2 nodes")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")


def direction_task(cfg: DirectionTaskConfig) -> tuple[DirectedGraph, LabeledNodes]:
    """Random digraph whose binary label compares in- vs out-neighbor means."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.num_nodes
    srcs, dsts = [], []
    for i in range(n):
        deg = rng.binomial(n - 1, cfg.p)
        if deg == 0:
            continue
        cols = rng.choice(n - 1, size=deg, replace=False)
        cols = cols + (cols >= i)  # skip the diagonal slot
        srcs.append(np.full(deg, i, dtype=np.int64))
        dsts.append(cols.astype(np.int64))
    if srcs:
        src = np.concatenate(srcs)
        dst = np.concatenate(dsts)
        edges = np.column_stack([src, dst])
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    graph = DirectedGraph.from_edge_list(edges, n)

    features = rng.uniform(-1.0, 1.0, size=n)
    in_sum = np.zeros(n)
    out_sum = np.zeros(n)
    if len(edges):
        np.add.at(out_sum, edges[:, 0], features[edges[:, 1]])
        np.add.at(in_sum, edges[:, 1], features[edges[:, 0]])
    din = graph.in_degree()
    dout = graph.out_degree()
    in_mean = np.where(din > 0, in_sum / np.maximum(din, 1), 0.0)
    out_mean = np.where(dout > 0, out_sum / np.maximum(dout, 1), 0.0)
    labels = (in_mean > out_mean).astype(np.int64)
    return graph, LabeledNodes(labels, 2, features[:, None])
