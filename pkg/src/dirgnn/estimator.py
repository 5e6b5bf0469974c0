"""Scikit-learn style front end for transductive node classification.

DirGNNClassifier wraps the model/trainer pair behind the familiar
fit/predict/score surface so it composes with sklearn tooling (get_params,
set_params, clone).  The graph is data, not a hyperparameter, so it is passed
to fit alongside the features; unlabeled nodes are marked with -1 in y,
matching sklearn's semi-supervised convention.  Labeled nodes are split into
train/validation internally for early stopping.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .graph import DirectedGraph, LabeledNodes
from .nn import ModelConfig, build_operators
from .training import TrainConfig, train


def _check_fit_inputs(graph: DirectedGraph, X, y):
    if not isinstance(graph, DirectedGraph):
        raise TypeError("graph must be a DirectedGraph")
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (graph.num_nodes,):
        raise ValueError(f"y must have one entry per node ({graph.num_nodes}), "
                         f"got shape {y.shape}")
    if X is None:
        X = np.ones((graph.num_nodes, 1))
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != graph.num_nodes:
        raise ValueError(f"X must be 2-d with one row per node, got shape {X.shape}")
    labeled = np.flatnonzero(y >= 0)
    if labeled.size < 2:
        raise ValueError("need at least 2 labeled nodes (y >= 0)")
    return X, y, labeled


class DirGNNClassifier(BaseEstimator, ClassifierMixin):
    """Direction-aware graph convolution classifier.

    Parameters mirror the model and trainer defaults: `conv` picks the layer
    family (dir-gcn / dir-sage / gcn / sage), `alpha` balances the
    out-edge vs in-edge branch (0.5 = both equally, 1 = out only, 0 = in
    only).  `val_fraction` of the labeled nodes is held out for early
    stopping.
    """

    def __init__(self, conv: str = "dir-gcn", alpha: float = 0.5,
                 num_layers: int = 3, hidden_dim: int = 64, jk: str = "max",
                 l2_normalize: bool = True, dropout: float = 0.0,
                 lr: float = 0.001, max_epochs: int = 10000, patience: int = 200,
                 val_fraction: float = 0.25, seed: int = 0):
        self.conv = conv
        self.alpha = alpha
        self.num_layers = num_layers
        self.hidden_dim = hidden_dim
        self.jk = jk
        self.l2_normalize = l2_normalize
        self.dropout = dropout
        self.lr = lr
        self.max_epochs = max_epochs
        self.patience = patience
        self.val_fraction = val_fraction
        self.seed = seed

    def fit(self, X, y, graph: DirectedGraph = None):
        """Fit on one graph.  X: (n, d) features or None; y: labels with -1
        marking nodes to exclude from supervision."""
        if graph is None:
            raise ValueError("fit requires graph=<DirectedGraph>")
        X, y, labeled = _check_fit_inputs(graph, X, y)
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie strictly between 0 and 1")
        self.classes_ = np.unique(y[labeled])
        num_classes = int(y[labeled].max()) + 1

        rng = np.random.default_rng(self.seed)
        perm = rng.permutation(labeled)
        n_val = max(1, int(len(labeled) * self.val_fraction))
        if n_val >= len(labeled):
            n_val = len(labeled) - 1
        val_idx = np.sort(perm[:n_val])
        train_idx = np.sort(perm[n_val:])

        # the trainer wants a full cover; reuse val as the (unreported) test slot
        y_filled = y.copy()
        y_filled[y_filled < 0] = 0  # placeholders, never indexed by any split
        model_cfg = ModelConfig(kind=self.conv, num_layers=self.num_layers,
                                hidden_dim=self.hidden_dim, alpha=self.alpha,
                                jk=self.jk, l2_normalize=self.l2_normalize,
                                dropout=self.dropout)
        train_cfg = TrainConfig(lr=self.lr, max_epochs=self.max_epochs,
                                patience=self.patience, seed=self.seed,
                                splits=(train_idx, val_idx, val_idx))
        data = LabeledNodes(y_filled, num_classes, X)
        result, model = train(model_cfg, graph, data, train_cfg)

        self.graph_ = graph
        self.model_ = model
        self.operators_ = build_operators(graph, self.conv)
        self.history_ = result
        self.logits_ = model.forward(self.operators_, X).value
        return self

    def _require_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("this DirGNNClassifier instance is not fitted yet")

    def decision_function(self, X=None) -> np.ndarray:
        """Per-node logits; with X=None, the logits from the fitted graph."""
        self._require_fitted()
        if X is None:
            return self.logits_
        X = np.asarray(X, dtype=np.float64)
        return self.model_.forward(self.operators_, X).value

    def predict_proba(self, X=None) -> np.ndarray:
        z = self.decision_function(X)
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def predict(self, X=None) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)

    def score(self, X, y, idx=None) -> float:
        """Accuracy of predict(X) against y, optionally restricted to idx."""
        preds = self.predict(X)
        y = np.asarray(y)
        if idx is not None:
            idx = np.asarray(idx, dtype=np.int64)
            return float(np.mean(preds[idx] == y[idx]))
        keep = y >= 0
        return float(np.mean(preds[keep] == y[keep]))
