"""Minimal reverse-mode autodiff over dense float64 numpy arrays.

Every primitive builds a Tensor holding the forward value and a closure that
scatters the upstream gradient into its parents; backward() walks the tape in
reverse topological order and accumulates.  Closures may capture parent
tensors and plain arrays but never the output tensor itself — a closure
holding its own node is a reference cycle, and training loops that build a
graph per epoch then leak until the cyclic collector runs.  Sparse operators
enter only as constants through spmm, so no gradient ever flows into a
graph.  Each op checks its output for NaN/Inf and raises NumericError on the
spot, which keeps diverging runs from failing silently.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError, ShapeMismatchError
from .sparse import SparseMatrix
from .sparse import spmm as _spmm_raw


def _finite(value: np.ndarray, op: str) -> np.ndarray:
    # a finite sum proves every entry finite (NaN/Inf always propagate);
    # a non-finite sum may just be overflow, so confirm entrywise before raising
    if not np.isfinite(value.sum()) and not np.all(np.isfinite(value)):
        raise NumericError(f"non-finite value produced by {op}")
    return value


class Tensor:
    """Node of the tape: a value, an accumulated gradient, and its parents."""

    __slots__ = ("value", "grad", "_parents", "_backward", "__weakref__")

    def __init__(self, value, _parents=(), _backward=None, _op="tensor"):
        self.value = _finite(np.asarray(value, dtype=np.float64), _op)
        self.grad = None
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.value.shape

    def accumulate(self, g: np.ndarray) -> None:
        self.grad = g if self.grad is None else self.grad + g

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Reverse-mode sweep seeding d(self)/d(self) = 1."""
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack = [(self, iter(self._parents))]
        seen.add(id(self))
        while stack:
            node, it = stack[-1]
            advanced = False
            for parent in it:
                if id(parent) not in seen:
                    seen.add(id(parent))
                    stack.append((parent, iter(parent._parents)))
                    advanced = True
                    break
            if not advanced:
                topo.append(node)
                stack.pop()
        self.accumulate(np.ones_like(self.value))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __repr__(self):
        return f"Tensor(shape={self.value.shape})"


def parameter(value) -> Tensor:
    return Tensor(np.array(value, dtype=np.float64))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.value.shape[-1] != b.value.shape[0]:
        raise ShapeMismatchError(f"matmul shapes do not chain: {a.shape} @ {b.shape}")
    out = Tensor(a.value @ b.value, (a, b), _op="matmul")

    def backward(g):
        a.accumulate(g @ b.value.T)
        b.accumulate(a.value.T @ g)

    out._backward = backward
    return out


def spmm(mat: SparseMatrix, x: Tensor) -> Tensor:
    """Sparse constant @ dense tensor; the gradient only flows into x."""
    out = Tensor(_spmm_raw(mat, x.value), (x,), _op="spmm")
    mat_t = mat.transpose()

    def backward(g):
        x.accumulate(_spmm_raw(mat_t, g))

    out._backward = backward
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.value.shape != b.value.shape:
        raise ShapeMismatchError(f"add shapes differ: {a.shape} vs {b.shape}")
    out = Tensor(a.value + b.value, (a, b), _op="add")

    def backward(g):
        a.accumulate(g)
        b.accumulate(g)

    out._backward = backward
    return out


def add_rowvec(a: Tensor, bias: Tensor) -> Tensor:
    """Add a (1, d) bias row to every row of a (n, d) tensor."""
    if bias.value.shape != (1, a.value.shape[1]):
        raise ShapeMismatchError(
            f"bias must be (1, {a.value.shape[1]}), got {bias.value.shape}")
    out = Tensor(a.value + bias.value, (a, bias), _op="add_rowvec")

    def backward(g):
        a.accumulate(g)
        bias.accumulate(g.sum(axis=0, keepdims=True))

    out._backward = backward
    return out


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    out = Tensor(a.value * c, (a,), _op="scale")

    def backward(g):
        a.accumulate(g * c)

    out._backward = backward
    return out


def relu(a: Tensor) -> Tensor:
    y = np.maximum(a.value, 0.0)
    mask = y > 0
    out = Tensor(y, (a,), _op="relu")

    def backward(g):
        a.accumulate(g * mask)

    out._backward = backward
    return out


def row_l2_normalize(a: Tensor) -> Tensor:
    """Scale each row to unit L2 norm; all-zero rows stay zero."""
    norms = np.linalg.norm(a.value, axis=1, keepdims=True)
    inv = np.where(norms > 0, 1.0 / np.maximum(norms, 1e-300), 0.0)
    y = a.value * inv
    out = Tensor(y, (a,), _op="row_l2_normalize")

    def backward(g):
        # d/dx (x / |x|) = (g - y * <g, y>) / |x| rowwise
        dot = np.sum(g * y, axis=1, keepdims=True)
        a.accumulate((g - y * dot) * inv)

    out._backward = backward
    return out


def rowwise_max_pool(tensors: list[Tensor]) -> Tensor:
    """Elementwise max across same-shape tensors; ties route the gradient to
    the earliest tensor in the list."""
    if not tensors:
        raise ValueError("rowwise_max_pool needs at least one tensor")
    shape = tensors[0].value.shape
    for t in tensors:
        if t.value.shape != shape:
            raise ShapeMismatchError("rowwise_max_pool inputs must share a shape")
    y = np.maximum.reduce([t.value for t in tensors])
    out = Tensor(y, tuple(tensors), _op="rowwise_max_pool")

    def backward(g):
        # ties route the gradient to the earliest tensor only
        claimed = np.zeros(y.shape, dtype=bool)
        for t in tensors:
            win = (t.value == y) & ~claimed
            claimed |= win
            t.accumulate(g * win)

    out._backward = backward
    return out


def concat_cols(tensors: list[Tensor]) -> Tensor:
    """Column-wise concatenation of same-height tensors."""
    if not tensors:
        raise ValueError("concat_cols needs at least one tensor")
    height = tensors[0].value.shape[0]
    for t in tensors:
        if t.value.shape[0] != height:
            raise ShapeMismatchError("concat_cols inputs must share a height")
    out = Tensor(np.concatenate([t.value for t in tensors], axis=1),
                 tuple(tensors), _op="concat_cols")
    splits = np.cumsum([t.value.shape[1] for t in tensors])[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, splits, axis=1)):
            t.accumulate(piece)

    out._backward = backward
    return out


def dropout(a: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout; identity when rate == 0."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    if rate == 0.0:
        return a
    keep = (rng.random(a.value.shape) >= rate) / (1.0 - rate)
    out = Tensor(a.value * keep, (a,), _op="dropout")

    def backward(g):
        a.accumulate(g * keep)

    out._backward = backward
    return out


def softmax_cross_entropy(logits: Tensor, labels: np.ndarray,
                          idx: np.ndarray | None = None) -> Tensor:
    """Mean cross-entropy of row-wise softmax against integer labels.

    With idx given, only those rows enter the mean; idx must be non-empty.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if idx is None:
        idx = np.arange(logits.value.shape[0])
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("softmax_cross_entropy over an empty index set")
    z = logits.value[idx]
    y = labels[idx]
    z = z - z.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = z - logsumexp
    loss = -float(np.mean(logp[np.arange(len(y)), y]))
    out = Tensor(np.asarray(loss), (logits,), _op="softmax_cross_entropy")

    def backward(g):
        soft = np.exp(logp)
        soft[np.arange(len(y)), y] -= 1.0
        full = np.zeros_like(logits.value)
        full[idx] = soft * (float(g) / len(y))
        logits.accumulate(full)

    out._backward = backward
    return out


def gradient_check(loss_fn, params: list[Tensor], step: float = 1e-5) -> float:
    """Max relative error between backprop and central differences.

    loss_fn() must rebuild the forward pass from the current parameter values
    and return a scalar Tensor.  Avoid kinks (ReLU at 0, pooling ties) when
    choosing inputs; the comparison is meaningless at nondifferentiable
    points.
    """
    for p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    grads = [np.array(p.grad, copy=True) if p.grad is not None
             else np.zeros_like(p.value) for p in params]
    worst = 0.0
    for p, g in zip(params, grads):
        flat = p.value.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            up = float(loss_fn().value)
            flat[i] = keep - step
            down = float(loss_fn().value)
            flat[i] = keep
            numeric = (up - down) / (2.0 * step)
            analytic = float(g.reshape(-1)[i])
            err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, err)
    return worst
