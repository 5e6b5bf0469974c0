import numpy as np
import pytest

from dirgnn import (DirectionTaskConfig, ModelConfig, TrainConfig,
                    TrainingError, direction_task, random_split, repeat_train,
                    train)
from dirgnn.autodiff import parameter
from dirgnn.training import Adam, accuracy


def small_task(n=80, p=0.08, seed=0):
    return direction_task(DirectionTaskConfig(num_nodes=n, p=p, seed=seed))


def test_random_split_sizes_and_properties():
    train_idx, val_idx, test_idx = random_split(100, (0.5, 0.25, 0.25), seed=0)
    assert (len(train_idx), len(val_idx), len(test_idx)) == (50, 25, 25)
    joined = np.concatenate([train_idx, val_idx, test_idx])
    assert len(np.unique(joined)) == 100  # disjoint and covering
    assert np.all(np.diff(train_idx) > 0)  # sorted
    # floor sizing: 4 nodes at (0.5, 0.25, 0.25) -> 2, 1, 1
    a, b, c = random_split(4, (0.5, 0.25, 0.25), seed=1)
    assert (len(a), len(b), len(c)) == (2, 1, 1)


def test_random_split_deterministic_per_seed():
    a1 = random_split(50, seed=3)
    a2 = random_split(50, seed=3)
    b = random_split(50, seed=4)
    assert all(np.array_equal(x, y) for x, y in zip(a1, a2))
    assert not all(np.array_equal(x, y) for x, y in zip(a1, b))


def test_random_split_rejects_degenerate():
    with pytest.raises(ValueError):
        random_split(2)
    with pytest.raises(ValueError):
        random_split(5, (0.05, 0.05, 0.9))


def test_accuracy_tie_resolves_to_lowest_class():
    logits = np.array([[1.0, 1.0], [0.0, 1.0]])
    labels = np.array([0, 1])
    assert accuracy(logits, labels, np.array([0, 1])) == 1.0
    assert accuracy(logits, np.array([1, 1]), np.array([0, 1])) == 0.5
    with pytest.raises(ValueError):
        accuracy(logits, labels, np.array([], dtype=np.int64))


def test_adam_first_step_magnitude():
    # with bias correction the very first update is lr * g / (|g| + eps)
    p = parameter(np.zeros((2, 2)))
    opt = Adam([p], lr=0.01)
    p.grad = np.full((2, 2), 3.0)
    opt.step()
    assert np.allclose(p.value, -0.01 * 3.0 / (3.0 + 1e-8), atol=1e-12)


def test_adam_constant_gradient_step_approaches_lr():
    p = parameter(np.zeros((1, 1)))
    opt = Adam([p], lr=0.5)
    prev = p.value.copy()
    for _ in range(200):
        p.grad = np.array([[2.0]])
        opt.step()
    delta = abs(float(p.value[0, 0] - prev[0, 0])) / 200
    assert abs(delta - 0.5) < 0.02  # average per-step movement ~ lr


def test_adam_rejects_nonfinite_gradient():
    from dirgnn import NumericError
    p = parameter(np.zeros((1, 1)))
    opt = Adam([p], lr=0.1)
    p.grad = np.array([[np.inf]])
    with pytest.raises(NumericError):
        opt.step()


def test_adam_skips_params_without_grad():
    p = parameter(np.ones((1, 1)))
    opt = Adam([p], lr=0.1)
    opt.step()
    assert p.value == 1.0


def base_cfg(**kw):
    defaults = dict(kind="dir-sage", num_layers=2, hidden_dim=8, alpha=0.5,
                    jk="max", l2_normalize=True)
    defaults.update(kw)
    return ModelConfig(**defaults)


def test_train_is_deterministic():
    g, data = small_task()
    cfg = TrainConfig(lr=0.01, max_epochs=60, patience=30, seed=1)
    r1, m1 = train(base_cfg(), g, data, cfg)
    r2, m2 = train(base_cfg(), g, data, cfg)
    assert r1.best_epoch == r2.best_epoch
    assert r1.best_val_accuracy == r2.best_val_accuracy
    assert r1.test_accuracy == r2.test_accuracy
    assert r1.val_trajectory == r2.val_trajectory
    for a, b in zip(m1.get_state(), m2.get_state()):
        assert np.array_equal(a, b)


def test_train_learns_direction_task():
    g, data = small_task(n=120, p=0.1)
    cfg = TrainConfig(lr=0.01, max_epochs=400, patience=100, seed=0)
    result, _ = train(base_cfg(), g, data, cfg)
    assert result.best_val_accuracy >= 0.7  # clearly better than chance


def test_early_stopping_and_trajectory_bookkeeping():
    g, data = small_task()
    cfg = TrainConfig(lr=0.01, max_epochs=5000, patience=10, seed=2)
    result, _ = train(base_cfg(num_layers=1), g, data, cfg)
    assert result.epochs_run < 5000  # patience must fire long before the cap
    assert result.epochs_run == result.best_epoch + 10
    assert len(result.val_trajectory) == result.epochs_run
    assert result.best_val_accuracy == max(result.val_trajectory)
    # ties keep the earliest epoch
    first_hit = result.val_trajectory.index(result.best_val_accuracy) + 1
    assert result.best_epoch == first_hit


def test_restored_model_reproduces_best_val_accuracy():
    g, data = small_task(n=100, p=0.08, seed=4)
    cfg = TrainConfig(lr=0.01, max_epochs=80, patience=40, seed=3)
    result, model = train(base_cfg(), g, data, cfg)
    from dirgnn.nn import build_operators
    from dirgnn.training import random_split as rs
    train_idx, val_idx, test_idx = rs(g.num_nodes, cfg.fractions, cfg.seed)
    logits = model.forward(build_operators(g, "dir-sage"), data.features).value
    assert accuracy(logits, data.labels, val_idx) == pytest.approx(result.best_val_accuracy)
    assert accuracy(logits, data.labels, test_idx) == pytest.approx(result.test_accuracy)


def test_explicit_splits_respected():
    g, data = small_task(n=60, p=0.1, seed=5)
    tr = np.arange(0, 40)
    va = np.arange(40, 50)
    te = np.arange(50, 60)
    cfg = TrainConfig(lr=0.01, max_epochs=30, patience=20, splits=(tr, va, te))
    result, model = train(base_cfg(), g, data, cfg)
    from dirgnn.nn import build_operators
    logits = model.forward(build_operators(g, "dir-sage"), data.features).value
    assert accuracy(logits, data.labels, va) == pytest.approx(result.best_val_accuracy)
    # fractions are ignored (not validated) when explicit splits are given
    TrainConfig(splits=(tr, va, te), fractions=(2.0, 2.0, 2.0))


def test_empty_explicit_split_rejected():
    g, data = small_task(n=30, p=0.15, seed=6)
    cfg = TrainConfig(splits=(np.arange(20), np.array([], dtype=np.int64),
                              np.arange(20, 30)))
    with pytest.raises(ValueError):
        train(base_cfg(), g, data, cfg)


def test_divergence_raises_training_error():
    g, data = small_task(n=40, p=0.15, seed=7)
    # an absurd step size pushes weights to ~1e200; without row normalization
    # the second forward pass overflows to inf and must surface as a
    # TrainingError carrying the last finite epoch
    cfg = TrainConfig(lr=1e200, max_epochs=400, patience=400, seed=0)
    with pytest.raises(TrainingError) as info, np.errstate(all="ignore"):
        train(base_cfg(activation="identity", l2_normalize=False, jk="none"),
              g, data, cfg)
    assert info.value.last_good_epoch >= 0


def test_dropout_run_still_deterministic():
    g, data = small_task(n=60, p=0.1, seed=8)
    cfg = TrainConfig(lr=0.01, max_epochs=40, patience=40, seed=5)
    r1, _ = train(base_cfg(dropout=0.3), g, data, cfg)
    r2, _ = train(base_cfg(dropout=0.3), g, data, cfg)
    assert r1.val_trajectory == r2.val_trajectory


def test_features_default_to_constant_column():
    from dirgnn import DirectedGraph, LabeledNodes
    g = DirectedGraph.from_edge_list([(i, i + 1) for i in range(19)], 20)
    data = LabeledNodes(np.arange(20) % 2, 2)  # no features given
    cfg = TrainConfig(lr=0.01, max_epochs=5, patience=5, seed=0)
    result, _ = train(base_cfg(num_layers=1), g, data, cfg)
    assert result.epochs_run == 5


def test_repeat_train_aggregates():
    g, data = small_task(n=60, p=0.1, seed=9)
    cfg = TrainConfig(lr=0.01, max_epochs=25, patience=25, seed=10)
    agg = repeat_train(base_cfg(), g, data, cfg, repeats=3)
    assert agg["repeats"] == 3
    accs = [r["test_accuracy"] for r in agg["runs"]]
    assert agg["test_accuracy_mean"] == pytest.approx(np.mean(accs))
    assert agg["test_accuracy_std"] == pytest.approx(np.std(accs))
    # different seeds -> different random splits, so runs differ in general
    assert len(agg["runs"]) == 3
    with pytest.raises(ValueError):
        repeat_train(base_cfg(), g, data, cfg, repeats=0)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(lr=0.0)
    with pytest.raises(ValueError):
        TrainConfig(patience=0)
    with pytest.raises(ValueError):
        TrainConfig(fractions=(0.5, 0.5, 0.5))
