"""Diffusion operators derived from a directed graph.

One-hop: the adjacency A, its transpose At, and the binary symmetrization Au.
Two-hop: the products A2, At2, AtA, AAt, Au2 with raw (integer-valued)
entries; AtA pairs nodes pointed at by a shared source, AAt pairs nodes
pointing at a shared target.  Normalized propagation operators used by the layers:
S_fwd_gcn (degree-symmetric), S_row_fwd and S_row_bwd (row-stochastic).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .graph import DirectedGraph
from .sparse import SparseMatrix, spgemm


class OperatorKind(str, Enum):
    A = "a"
    AT = "at"
    AU = "au"
    A2 = "a2"
    AT2 = "at2"
    ATA = "ata"
    AAT = "aat"
    AU2 = "au2"
    S_FWD_GCN = "s_fwd_gcn"
    S_ROW_FWD = "s_row_fwd"
    S_ROW_BWD = "s_row_bwd"


def adjacency(graph: DirectedGraph) -> SparseMatrix:
    """Binary adjacency A with A[i, j] = 1 iff edge (i, j)."""
    n = graph.num_nodes
    e = graph.edge_array()
    return SparseMatrix.from_coo(e[:, 0], e[:, 1], np.ones(len(e)), (n, n))


def adjacency_transpose(graph: DirectedGraph) -> SparseMatrix:
    return adjacency(graph).transpose()


def adjacency_undirected(graph: DirectedGraph) -> SparseMatrix:
    """Binary symmetrization: Au[i, j] = 1 iff (i, j) or (j, i) is an edge."""
    n = graph.num_nodes
    e = graph.edge_array()
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return SparseMatrix.from_coo(rows, cols, np.ones(len(rows)), (n, n), binary=True)


def symmetrized_average(graph: DirectedGraph) -> SparseMatrix:
    """Averaged symmetrization (A + At) / 2; one-way edges weigh 0.5."""
    a = adjacency(graph)
    return a.add(a.transpose()).scale(0.5)


def gcn_normalize_fwd(graph: DirectedGraph) -> SparseMatrix:
    """Degree-symmetric forward operator with entries a_ij / sqrt(d_out_i * d_in_j).

    Rows of out-degree-0 nodes and columns of in-degree-0 nodes are empty, so
    no degree is ever zero where an entry exists.
    """
    n = graph.num_nodes
    e = graph.edge_array()
    dout = graph.out_degree().astype(np.float64)
    din = graph.in_degree().astype(np.float64)
    vals = 1.0 / np.sqrt(dout[e[:, 0]] * din[e[:, 1]])
    return SparseMatrix.from_coo(e[:, 0], e[:, 1], vals, (n, n))


def gcn_normalize_sym(graph: DirectedGraph) -> SparseMatrix:
    """Degree-symmetric operator on the binary symmetrization Au."""
    au = adjacency_undirected(graph)
    deg = au.row_sums()
    rows, cols, vals = au.to_coo()
    vals = vals / np.sqrt(deg[rows] * deg[cols])
    return SparseMatrix.from_coo(rows, cols, vals, au.shape)


def row_normalize(mat: SparseMatrix) -> SparseMatrix:
    """Divide every row by its sum; empty rows stay empty."""
    sums = mat.row_sums()
    rows, cols, vals = mat.to_coo()
    vals = vals / sums[rows]
    return SparseMatrix.from_coo(rows, cols, vals, mat.shape)


def two_hop_family(graph: DirectedGraph, directed: bool = True):
    """Operator family probed by effective homophily, as (kind, matrix) pairs.

    directed=True: [A, At, A2, At2, AtA, AAt]; else [Au, Au2].  Two-hop
    products keep their raw counts, including diagonal entries.
    """
    if directed:
        a = adjacency(graph)
        at = a.transpose()
        return [
            (OperatorKind.A, a),
            (OperatorKind.AT, at),
            (OperatorKind.A2, spgemm(a, a)),
            (OperatorKind.AT2, spgemm(at, at)),
            (OperatorKind.ATA, spgemm(at, a)),
            (OperatorKind.AAT, spgemm(a, at)),
        ]
    au = adjacency_undirected(graph)
    return [
        (OperatorKind.AU, au),
        (OperatorKind.AU2, spgemm(au, au)),
    ]


def build_operator(graph: DirectedGraph, kind: OperatorKind) -> SparseMatrix:
    """Materialize any member of the operator family by tag."""
    kind = OperatorKind(kind)
    if kind == OperatorKind.A:
        return adjacency(graph)
    if kind == OperatorKind.AT:
        return adjacency_transpose(graph)
    if kind == OperatorKind.AU:
        return adjacency_undirected(graph)
    if kind == OperatorKind.A2:
        a = adjacency(graph)
        return spgemm(a, a)
    if kind == OperatorKind.AT2:
        at = adjacency_transpose(graph)
        return spgemm(at, at)
    if kind == OperatorKind.ATA:
        a = adjacency(graph)
        return spgemm(a.transpose(), a)
    if kind == OperatorKind.AAT:
        a = adjacency(graph)
        return spgemm(a, a.transpose())
    if kind == OperatorKind.AU2:
        au = adjacency_undirected(graph)
        return spgemm(au, au)
    if kind == OperatorKind.S_FWD_GCN:
        return gcn_normalize_fwd(graph)
    if kind == OperatorKind.S_ROW_FWD:
        return row_normalize(adjacency(graph))
    if kind == OperatorKind.S_ROW_BWD:
        return row_normalize(adjacency_transpose(graph))
    raise ValueError(f"unknown operator kind: {kind!r}")
