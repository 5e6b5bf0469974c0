"""File formats: edge-list text, label CSV, feature CSV, split JSON.

Edge list: one ``src dst`` pair per line, whitespace separated; blank lines
and ``#`` comments are skipped.  Labels: CSV with header ``node,label``.
Features: headerless CSV where row i holds node i's feature vector.

When an edge list uses sparse or non-0-based ids, ingestion compacts them to
dense 0-based ids (sorted original order) and returns the remapping table.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import IngestionError
from .graph import DirectedGraph, LabeledNodes


def read_edge_pairs(path) -> list[tuple[int, int]]:
    """Raw (src, dst) pairs from an edge-list file, ids as written."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise IngestionError(f"{path}:{lineno}: expected 'src dst', got {line.strip()!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise IngestionError(f"{path}:{lineno}: non-integer node id in {line.strip()!r}")
    return pairs


def read_edge_list(path, num_nodes: int | None = None):
    """Load a graph from an edge-list file.

    Returns (graph, id_map) where id_map is None when the file already used
    dense 0-based ids, else a dict old_id -> new_id.  With ``num_nodes`` given,
    ids must already be dense and within range.
    """
    pairs = read_edge_pairs(path)
    if num_nodes is not None:
        return DirectedGraph.from_edge_list(pairs, num_nodes), None
    if not pairs:
        raise IngestionError(f"{path}: no edges and no node count given")
    ids = np.unique(np.asarray(pairs, dtype=np.int64))
    dense = ids[0] == 0 and ids[-1] == len(ids) - 1
    if dense:
        return DirectedGraph.from_edge_list(pairs, len(ids)), None
    if ids[0] < 0:
        raise IngestionError(f"{path}: negative node id {ids[0]}")
    id_map = {int(old): new for new, old in enumerate(ids)}
    remapped = [(id_map[s], id_map[d]) for s, d in pairs]
    return DirectedGraph.from_edge_list(remapped, len(ids)), id_map


def write_edge_list(path, graph: DirectedGraph) -> None:
    with open(path, "w") as fh:
        for s, d in graph.edge_array():
            fh.write(f"{s} {d}\n")


def read_labels(path, num_nodes: int, id_map: dict | None = None) -> tuple[np.ndarray, int]:
    """Labels CSV -> (labels array, num_classes).

    Label values are compacted to 0..C-1 in sorted order if they are not
    already dense.  Every node must receive exactly one label.
    """
    labels = np.full(num_nodes, -1, dtype=np.int64)
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["node", "label"]:
            raise IngestionError(f"{path}: expected header 'node,label'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise IngestionError(f"{path}:{lineno}: expected 'node,label'")
            try:
                node, label = int(row[0]), int(row[1])
            except ValueError:
                raise IngestionError(f"{path}:{lineno}: non-integer entry in {row!r}")
            if id_map is not None:
                if node not in id_map:
                    raise IngestionError(f"{path}:{lineno}: node id {node} not present in graph")
                node = id_map[node]
            if not 0 <= node < num_nodes:
                raise IngestionError(f"{path}:{lineno}: node id {node} outside [0, {num_nodes})")
            if labels[node] != -1:
                raise IngestionError(f"{path}:{lineno}: node {node} labeled twice")
            labels[node] = label
    if (labels == -1).any():
        missing = int(np.argmax(labels == -1))
        raise IngestionError(f"{path}: node {missing} has no label")
    values = np.unique(labels)
    if values[0] != 0 or values[-1] != len(values) - 1:
        lut = {int(v): k for k, v in enumerate(values)}
        labels = np.asarray([lut[int(v)] for v in labels], dtype=np.int64)
    return labels, int(labels.max()) + 1


def write_labels(path, labels: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "label"])
        for i, y in enumerate(labels):
            writer.writerow([i, int(y)])


def read_features(path, num_nodes: int) -> np.ndarray:
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise IngestionError(f"{path}:{lineno}: expected {width} columns, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise IngestionError(f"{path}:{lineno}: non-numeric feature value")
    if len(rows) != num_nodes:
        raise IngestionError(f"{path}: {len(rows)} feature rows for {num_nodes} nodes")
    return np.asarray(rows, dtype=np.float64)


def write_features(path, features: np.ndarray) -> None:
    with open(path, "w") as fh:
        for row in np.asarray(features, dtype=np.float64):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_splits(path, num_nodes: int):
    """Split JSON {'train': [...], 'val': [...], 'test': [...]} -> index arrays."""
    with open(path) as fh:
        blob = json.load(fh)
    out = []
    for key in ("train", "val", "test"):
        if key not in blob:
            raise IngestionError(f"{path}: missing '{key}' index list")
        idx = np.asarray(blob[key], dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= num_nodes):
            raise IngestionError(f"{path}: '{key}' contains out-of-range node ids")
        out.append(idx)
    return tuple(out)


def load_dataset(edge_path, labels_path=None, features_path=None, num_nodes=None):
    """Convenience loader tying the three files together.

    Returns (graph, LabeledNodes or None, id_map or None).  Feature rows are
    positional, so with a remapped graph they follow the remapped order.
    """
    graph, id_map = read_edge_list(edge_path, num_nodes)
    data = None
    if labels_path is not None:
        labels, num_classes = read_labels(labels_path, graph.num_nodes, id_map)
        features = None
        if features_path is not None:
            features = read_features(features_path, graph.num_nodes)
        data = LabeledNodes(labels, num_classes, features)
    return graph, data, id_map
