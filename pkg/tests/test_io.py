import json

import numpy as np
import pytest

from dirgnn import DirectedGraph, IngestionError
from dirgnn.io import (load_dataset, read_edge_list, read_features,
                       read_labels, read_splits, write_edge_list,
                       write_features, write_labels)

from conftest import random_digraph


def test_edge_list_round_trip(tmp_path, rng):
    g = random_digraph(rng, 20, 0.2)
    p = tmp_path / "g.txt"
    write_edge_list(p, g)
    g2, id_map = read_edge_list(p, num_nodes=20)
    assert id_map is None
    assert np.array_equal(g.edge_array(), g2.edge_array())


def test_edge_list_comments_and_blank_lines(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# header\n0 1\n\n1 2\n# trailing\n")
    g, _ = read_edge_list(p, num_nodes=3)
    assert g.num_edges == 2


def test_edge_list_sparse_id_compaction(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("10 30\n30 20\n")
    g, id_map = read_edge_list(p)
    assert g.num_nodes == 3
    assert id_map == {10: 0, 20: 1, 30: 2}
    assert g.has_edge(0, 2) and g.has_edge(2, 1)


def test_edge_list_error_names_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 two\n")
    with pytest.raises(IngestionError, match=":2:"):
        read_edge_list(p, num_nodes=3)
    p.write_text("0 1 2\n")
    with pytest.raises(IngestionError, match=":1:"):
        read_edge_list(p, num_nodes=3)


def test_labels_round_trip_and_compaction(tmp_path):
    p = tmp_path / "labels.csv"
    write_labels(p, np.array([5, 9, 5]))
    labels, c = read_labels(p, num_nodes=3)
    assert labels.tolist() == [0, 1, 0]
    assert c == 2


def test_labels_errors(tmp_path):
    p = tmp_path / "labels.csv"
    p.write_text("node,label\n0,0\n")
    with pytest.raises(IngestionError, match="no label"):
        read_labels(p, num_nodes=2)
    p.write_text("node,label\n0,0\n0,1\n")
    with pytest.raises(IngestionError, match="twice"):
        read_labels(p, num_nodes=1)
    p.write_text("label,node\n0,0\n")
    with pytest.raises(IngestionError, match="header"):
        read_labels(p, num_nodes=1)


def test_labels_id_map_translation(tmp_path):
    p = tmp_path / "labels.csv"
    p.write_text("node,label\n10,3\n30,7\n20,3\n")
    labels, c = read_labels(p, num_nodes=3, id_map={10: 0, 20: 1, 30: 2})
    assert labels.tolist() == [0, 0, 1]
    assert c == 2
    p.write_text("node,label\n99,0\n")
    with pytest.raises(IngestionError, match="not present"):
        read_labels(p, num_nodes=1, id_map={10: 0})


def test_features_round_trip(tmp_path, rng):
    x = rng.standard_normal((6, 3))
    p = tmp_path / "feat.csv"
    write_features(p, x)
    x2 = read_features(p, num_nodes=6)
    assert np.array_equal(x, x2)  # repr round-trips float64 exactly


def test_features_errors(tmp_path):
    p = tmp_path / "feat.csv"
    p.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(IngestionError, match="columns"):
        read_features(p, num_nodes=2)
    p.write_text("1.0,2.0\n")
    with pytest.raises(IngestionError, match="rows"):
        read_features(p, num_nodes=2)


def test_read_splits(tmp_path):
    p = tmp_path / "splits.json"
    p.write_text(json.dumps({"train": [0, 1], "val": [2], "test": [3]}))
    tr, va, te = read_splits(p, num_nodes=4)
    assert tr.tolist() == [0, 1] and va.tolist() == [2] and te.tolist() == [3]
    p.write_text(json.dumps({"train": [0], "val": [9], "test": [1]}))
    with pytest.raises(IngestionError, match="out-of-range"):
        read_splits(p, num_nodes=4)
    p.write_text(json.dumps({"train": [0], "test": [1]}))
    with pytest.raises(IngestionError, match="val"):
        read_splits(p, num_nodes=4)


def test_load_dataset(tmp_path):
    (tmp_path / "g.txt").write_text("0 1\n1 2\n")
    (tmp_path / "labels.csv").write_text("node,label\n0,0\n1,1\n2,0\n")
    (tmp_path / "feat.csv").write_text("1.0\n2.0\n3.0\n")
    g, data, id_map = load_dataset(tmp_path / "g.txt", tmp_path / "labels.csv",
                                   tmp_path / "feat.csv")
    assert g.num_nodes == 3
    assert id_map is None
    assert data.labels.tolist() == [0, 1, 0]
    assert data.features.shape == (3, 1)
