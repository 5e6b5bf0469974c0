import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dirgnn import (DirGNNClassifier, DirectionTaskConfig, direction_task)


@pytest.fixture(scope="module")
def task():
    return direction_task(DirectionTaskConfig(num_nodes=100, p=0.08, seed=0))


def make_clf(**kw):
    defaults = dict(conv="dir-sage", num_layers=2, hidden_dim=8, lr=0.01,
                    max_epochs=80, patience=40, seed=0)
    defaults.update(kw)
    return DirGNNClassifier(**defaults)


def test_get_set_params_and_clone():
    clf = make_clf(alpha=0.25)
    params = clf.get_params()
    assert params["alpha"] == 0.25 and params["conv"] == "dir-sage"
    clf.set_params(alpha=0.75)
    assert clf.alpha == 0.75
    twin = clone(clf)
    assert twin.get_params() == clf.get_params()


def test_fit_predict_score(task):
    g, data = task
    clf = make_clf().fit(data.features, data.labels, graph=g)
    preds = clf.predict()
    assert preds.shape == (g.num_nodes,)
    assert set(np.unique(preds)) <= {0, 1}
    acc = clf.score(None, data.labels)
    assert acc >= 0.6  # learns something well above chance
    proba = clf.predict_proba()
    assert proba.shape == (g.num_nodes, 2)
    assert np.allclose(proba.sum(axis=1), 1.0)
    assert np.array_equal(np.argmax(proba, axis=1), preds)


def test_unlabeled_nodes_excluded_from_supervision(task):
    g, data = task
    y = data.labels.copy()
    hidden = np.arange(0, 50)
    y[hidden] = -1
    clf = make_clf().fit(data.features, y, graph=g)
    # scoring against the original labels on the hidden half still works
    acc = clf.score(None, data.labels, idx=hidden)
    assert 0.0 <= acc <= 1.0
    assert clf.classes_.tolist() == [0, 1]


def test_score_default_skips_unlabeled(task):
    g, data = task
    y = data.labels.copy()
    y[:30] = -1
    clf = make_clf().fit(data.features, y, graph=g)
    preds = clf.predict()
    expect = float(np.mean(preds[30:] == y[30:]))
    assert clf.score(None, y) == pytest.approx(expect)


def test_decision_function_matches_history(task):
    g, data = task
    clf = make_clf().fit(data.features, data.labels, graph=g)
    z1 = clf.decision_function()
    z2 = clf.decision_function(data.features)
    assert np.allclose(z1, z2)
    assert clf.history_.best_val_accuracy >= 0.0


def test_fit_is_deterministic(task):
    g, data = task
    a = make_clf().fit(data.features, data.labels, graph=g)
    b = make_clf().fit(data.features, data.labels, graph=g)
    assert np.array_equal(a.logits_, b.logits_)


def test_requires_graph_and_fit(task):
    g, data = task
    with pytest.raises(ValueError, match="graph"):
        make_clf().fit(data.features, data.labels)
    with pytest.raises(NotFittedError):
        make_clf().predict()
    with pytest.raises(TypeError):
        make_clf().fit(data.features, data.labels, graph="not a graph")


def test_input_validation(task):
    g, data = task
    with pytest.raises(ValueError, match="one entry per node"):
        make_clf().fit(data.features, data.labels[:-1], graph=g)
    with pytest.raises(ValueError, match="one row per node"):
        make_clf().fit(data.features[:-1], data.labels, graph=g)
    y = np.full(g.num_nodes, -1)
    y[0] = 0
    with pytest.raises(ValueError, match="labeled"):
        make_clf().fit(data.features, y, graph=g)
    with pytest.raises(ValueError, match="val_fraction"):
        make_clf(val_fraction=1.0).fit(data.features, data.labels, graph=g)


def test_features_none_uses_constant_column(task):
    g, data = task
    clf = make_clf(max_epochs=5, patience=5).fit(None, data.labels, graph=g)
    assert clf.logits_.shape == (g.num_nodes, 2)
