"""Full-batch training loop with early stopping on validation accuracy.

Every epoch runs one forward/backward/Adam step on the training indices and
evaluates accuracy on all three splits with the pre-step parameters, so the
retained best checkpoint is exactly the parameter state that produced the
best validation score.  Test accuracy is only ever read off at that
checkpoint; ties keep the earliest epoch.  Runs are deterministic given the
config: one RNG stream seeds init and dropout, a separate one the split.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .errors import NumericError, TrainingError
from .graph import DirectedGraph, LabeledNodes, check_alignment
from .nn import DirModel, ModelConfig, build_operators


@dataclass
class TrainConfig:
    lr: float = 0.001
    max_epochs: int = 10000
    patience: int = 200
    seed: int = 0
    fractions: tuple = (0.5, 0.25, 0.25)
    splits: tuple | None = None  # explicit (train, val, test) index arrays

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.splits is None:
            f = tuple(float(x) for x in self.fractions)
            if len(f) != 3 or any(x <= 0 for x in f) or abs(sum(f) - 1.0) > 1e-9:
                raise ValueError("fractions must be three positive values summing to 1")
            self.fractions = f


@dataclass
class RunResult:
    best_epoch: int
    best_val_accuracy: float
    test_accuracy: float
    val_trajectory: list = field(default_factory=list)
    epochs_run: int = 0
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "best_epoch": self.best_epoch,
            "best_val_accuracy": self.best_val_accuracy,
            "test_accuracy": self.test_accuracy,
            "val_trajectory": [float(v) for v in self.val_trajectory],
            "epochs_run": self.epochs_run,
            "wall_time_s": self.wall_time_s,
        }


def random_split(n: int, fractions=(0.5, 0.25, 0.25), seed: int = 0):
    """Disjoint covering (train, val, test) index arrays, each sorted.

    Sizes are floor(n * fraction) for train and val; test takes the rest.
    """
    if n < 3:
        raise ValueError("need at least 3 nodes to split three ways")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(n * fractions[0])
    n_val = int(n * fractions[1])
    if n_train == 0 or n_val == 0 or n_train + n_val >= n:
        raise ValueError(f"fractions {fractions} leave an empty split for n={n}")
    train = np.sort(perm[:n_train])
    val = np.sort(perm[n_train:n_train + n_val])
    test = np.sort(perm[n_train + n_val:])
    return train, val, test


def accuracy(logits: np.ndarray, labels: np.ndarray, idx: np.ndarray) -> float:
    """Argmax accuracy over idx; argmax ties resolve to the lowest class."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("accuracy over an empty index set")
    preds = np.argmax(logits[idx], axis=1)
    return float(np.mean(preds == np.asarray(labels)[idx]))


class Adam:
    """Adam with bias correction; no weight decay."""

    def __init__(self, params, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.value) for p in self.params]
        self.v = [np.zeros_like(p.value) for p in self.params]

    def step(self) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for k, p in enumerate(self.params):
            g = p.grad
            if g is None:
                continue
            if not np.all(np.isfinite(g)):
                raise NumericError("non-finite gradient in Adam step")
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * (g * g)
            m_hat = self.m[k] / (1 - b1 ** self.t)
            v_hat = self.v[k] / (1 - b2 ** self.t)
            p.value -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()


def train(model_cfg: ModelConfig, graph: DirectedGraph, data: LabeledNodes,
          train_cfg: TrainConfig) -> tuple[RunResult, DirModel]:
    """Train a model on one graph; returns the result and the model restored
    to its best-validation checkpoint."""
    check_alignment(graph, data)
    t0 = time.perf_counter()
    n = graph.num_nodes
    if train_cfg.splits is not None:
        train_idx, val_idx, test_idx = (np.asarray(s, dtype=np.int64)
                                        for s in train_cfg.splits)
        if min(len(train_idx), len(val_idx), len(test_idx)) == 0:
            raise ValueError("explicit splits must all be non-empty")
    else:
        train_idx, val_idx, test_idx = random_split(n, train_cfg.fractions, train_cfg.seed)

    x = data.features if data.features is not None else np.ones((n, 1))
    operators = build_operators(graph, model_cfg.kind)
    rng = np.random.default_rng(train_cfg.seed)
    model = DirModel(model_cfg, x.shape[1], data.num_classes, rng)
    opt = Adam(model.parameters(), train_cfg.lr)
    labels = data.labels

    best_val = -1.0
    best_epoch = 0
    best_test = 0.0
    best_state = model.get_state()
    val_traj: list[float] = []
    epoch = 0
    try:
        for epoch in range(1, train_cfg.max_epochs + 1):
            logits = model.forward(operators, x, training=True, rng=rng)
            loss = ad.softmax_cross_entropy(logits, labels, train_idx)
            if model_cfg.dropout > 0.0:
                eval_logits = model.forward(operators, x, training=False).value
            else:
                eval_logits = logits.value
            preds = np.argmax(eval_logits, axis=1)
            val_acc = float(np.mean(preds[val_idx] == labels[val_idx]))
            val_traj.append(val_acc)
            if val_acc > best_val:
                best_val = val_acc
                best_epoch = epoch
                best_test = float(np.mean(preds[test_idx] == labels[test_idx]))
                best_state = model.get_state()
            opt.zero_grad()
            loss.backward()
            opt.step()
            if epoch - best_epoch >= train_cfg.patience:
                break
    except NumericError as exc:
        raise TrainingError(f"training diverged at epoch {epoch}: {exc}",
                            last_good_epoch=best_epoch) from exc
    model.set_state(best_state)
    result = RunResult(best_epoch=best_epoch, best_val_accuracy=best_val,
                       test_accuracy=best_test, val_trajectory=val_traj,
                       epochs_run=epoch, wall_time_s=time.perf_counter() - t0)
    return result, model


def repeat_train(model_cfg: ModelConfig, graph: DirectedGraph, data: LabeledNodes,
                 train_cfg: TrainConfig, repeats: int) -> dict:
    """Run `repeats` seeds (seed, seed+1, ...) and aggregate test accuracy."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    results = []
    for k in range(repeats):
        cfg_k = TrainConfig(lr=train_cfg.lr, max_epochs=train_cfg.max_epochs,
                            patience=train_cfg.patience, seed=train_cfg.seed + k,
                            fractions=train_cfg.fractions, splits=train_cfg.splits)
        result, _ = train(model_cfg, graph, data, cfg_k)
        results.append(result)
    accs = np.asarray([r.test_accuracy for r in results])
    return {
        "repeats": repeats,
        "test_accuracy_mean": float(accs.mean()),
        "test_accuracy_std": float(accs.std()),
        "runs": [r.to_dict() for r in results],
    }
