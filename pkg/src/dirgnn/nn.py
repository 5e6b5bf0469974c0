"""Message-passing layers and the node-classification model.

Each directed layer runs two aggregations, one along edge direction and one
against it, with separate weights:

    dir-gcn :  act(2a * S X W_fwd + 2(1-a) * S^T X W_bwd),
               S the degree-symmetric forward operator
    dir-sage:  act(X Omega + 2a * R_fwd X W_fwd + 2(1-a) * R_bwd X W_bwd),
               R_* the row-stochastic operators

The 2a / 2(1-a) scaling makes a=0.5 the plain unscaled two-direction sum
while a=1 (out-edges only) and a=0 (in-edges only) zero one branch.  The
undirected baselines gcn / sage use the same code paths over the symmetrized
operator with a single weight matrix.

The model stacks layers with optional per-layer row L2 normalization and
dropout on layer inputs, combines per-layer outputs by jumping knowledge
(none / max / cat), and decodes with one linear map.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import IngestionError, ShapeMismatchError
from .graph import DirectedGraph
from .operators import (adjacency, adjacency_transpose, adjacency_undirected,
                        gcn_normalize_fwd, gcn_normalize_sym, row_normalize)
from .sparse import SparseMatrix

LAYER_KINDS = ("dir-gcn", "dir-sage", "gcn", "sage")
JK_MODES = ("none", "max", "cat")
ACTIVATIONS = ("relu", "identity")


@dataclass
class ModelConfig:
    kind: str = "dir-gcn"
    num_layers: int = 3
    hidden_dim: int = 64
    alpha: float = 0.5
    jk: str = "max"
    l2_normalize: bool = True
    dropout: float = 0.0
    activation: str = "relu"

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"kind must be one of {LAYER_KINDS}, got {self.kind!r}")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        if self.hidden_dim < 1:
            raise ValueError("hidden_dim must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.jk not in JK_MODES:
            raise ValueError(f"jk must be one of {JK_MODES}, got {self.jk!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")

    @property
    def directed(self) -> bool:
        return self.kind in ("dir-gcn", "dir-sage")

    @property
    def has_self_term(self) -> bool:
        return self.kind in ("dir-sage", "sage")


@dataclass
class DirLayerParams:
    """Weights of one layer; omega is the self term (sage kinds only)."""

    w_fwd: Tensor
    w_bwd: Tensor | None
    omega: Tensor | None
    alpha: float

    def tensors(self) -> list[Tensor]:
        return [t for t in (self.w_fwd, self.w_bwd, self.omega) if t is not None]

    def count(self) -> int:
        return sum(t.value.size for t in self.tensors())


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> Tensor:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return ad.parameter(rng.uniform(-limit, limit, size=(fan_in, fan_out)))


def _act(x: Tensor, activation: str) -> Tensor:
    if activation == "relu":
        return ad.relu(x)
    if activation == "identity":
        return x
    raise ValueError(f"unknown activation {activation!r}")


def dir_gcn_layer(x: Tensor, s_fwd: SparseMatrix, params: DirLayerParams,
                  activation: str = "relu") -> Tensor:
    """Two-direction convolution over the degree-symmetric operator."""
    a = params.alpha
    terms = []
    if a > 0.0:
        # scaling the weight, not the activation, keeps the elementwise work
        # on the small matrix; the product is identical
        terms.append(ad.matmul(ad.spmm(s_fwd, x), ad.scale(params.w_fwd, 2.0 * a)))
    if a < 1.0:
        terms.append(ad.matmul(ad.spmm(s_fwd.transpose(), x),
                               ad.scale(params.w_bwd, 2.0 * (1.0 - a))))
    pre = terms[0] if len(terms) == 1 else ad.add(terms[0], terms[1])
    return _act(pre, activation)


def dir_sage_layer(x: Tensor, r_fwd: SparseMatrix, r_bwd: SparseMatrix,
                   params: DirLayerParams, activation: str = "relu") -> Tensor:
    """Two-direction mean aggregation plus a self term."""
    a = params.alpha
    pre = ad.matmul(x, params.omega)
    if a > 0.0:
        pre = ad.add(pre, ad.matmul(ad.spmm(r_fwd, x), ad.scale(params.w_fwd, 2.0 * a)))
    if a < 1.0:
        pre = ad.add(pre, ad.matmul(ad.spmm(r_bwd, x),
                                    ad.scale(params.w_bwd, 2.0 * (1.0 - a))))
    return _act(pre, activation)


def gcn_layer(x: Tensor, s_sym: SparseMatrix, params: DirLayerParams,
              activation: str = "relu") -> Tensor:
    return _act(ad.matmul(ad.spmm(s_sym, x), params.w_fwd), activation)


def sage_layer(x: Tensor, r_sym: SparseMatrix, params: DirLayerParams,
               activation: str = "relu") -> Tensor:
    pre = ad.add(ad.matmul(x, params.omega), ad.matmul(ad.spmm(r_sym, x), params.w_fwd))
    return _act(pre, activation)


def build_operators(graph: DirectedGraph, kind: str) -> dict:
    """Propagation operators a model kind needs, materialized once per graph."""
    if kind == "dir-gcn":
        return {"s_fwd": gcn_normalize_fwd(graph)}
    if kind == "dir-sage":
        return {"r_fwd": row_normalize(adjacency(graph)),
                "r_bwd": row_normalize(adjacency_transpose(graph))}
    if kind == "gcn":
        return {"s_sym": gcn_normalize_sym(graph)}
    if kind == "sage":
        return {"r_sym": row_normalize(adjacency_undirected(graph))}
    raise ValueError(f"kind must be one of {LAYER_KINDS}, got {kind!r}")


class DirModel:
    """Layer stack + jumping knowledge + linear decoder."""

    def __init__(self, cfg: ModelConfig, in_dim: int, num_classes: int,
                 rng: np.random.Generator):
        if in_dim < 1 or num_classes < 1:
            raise ValueError("in_dim and num_classes must be >= 1")
        self.cfg = cfg
        self.in_dim = in_dim
        self.num_classes = num_classes
        self.layers: list[DirLayerParams] = []
        for k in range(cfg.num_layers):
            d_in = in_dim if k == 0 else cfg.hidden_dim
            w_fwd = glorot(rng, d_in, cfg.hidden_dim)
            w_bwd = glorot(rng, d_in, cfg.hidden_dim) if cfg.directed else None
            omega = glorot(rng, d_in, cfg.hidden_dim) if cfg.has_self_term else None
            self.layers.append(DirLayerParams(w_fwd, w_bwd, omega, cfg.alpha))
        decode_in = cfg.hidden_dim * (cfg.num_layers if cfg.jk == "cat" else 1)
        self.decoder_w = glorot(rng, decode_in, num_classes)
        self.decoder_b = ad.parameter(np.zeros((1, num_classes)))

    # -- parameters ---------------------------------------------------------

    def parameters(self) -> list[Tensor]:
        out: list[Tensor] = []
        for layer in self.layers:
            out.extend(layer.tensors())
        out.extend([self.decoder_w, self.decoder_b])
        return out

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        names = []
        for k, layer in enumerate(self.layers):
            names.append((f"layer{k}.w_fwd", layer.w_fwd))
            if layer.w_bwd is not None:
                names.append((f"layer{k}.w_bwd", layer.w_bwd))
            if layer.omega is not None:
                names.append((f"layer{k}.omega", layer.omega))
        names.append(("decoder.w", self.decoder_w))
        names.append(("decoder.b", self.decoder_b))
        return names

    def layer_param_count(self) -> int:
        return sum(layer.count() for layer in self.layers)

    def get_state(self) -> list[np.ndarray]:
        return [p.value.copy() for p in self.parameters()]

    def set_state(self, state: list[np.ndarray]) -> None:
        for p, v in zip(self.parameters(), state):
            if p.value.shape != v.shape:
                raise ShapeMismatchError("state does not match model shapes")
            p.value[...] = v

    # -- forward --------------------------------------------------------------

    def forward(self, operators: dict, x: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        cfg = self.cfg
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeMismatchError(f"features must be (n, {self.in_dim}), got {x.shape}")
        h = Tensor(x)
        use_dropout = training and cfg.dropout > 0.0
        if use_dropout and rng is None:
            raise ValueError("training with dropout needs an rng")
        outs: list[Tensor] = []
        for params in self.layers:
            if use_dropout:
                h = ad.dropout(h, cfg.dropout, rng)
            if cfg.kind == "dir-gcn":
                h = dir_gcn_layer(h, operators["s_fwd"], params, cfg.activation)
            elif cfg.kind == "dir-sage":
                h = dir_sage_layer(h, operators["r_fwd"], operators["r_bwd"],
                                   params, cfg.activation)
            elif cfg.kind == "gcn":
                h = gcn_layer(h, operators["s_sym"], params, cfg.activation)
            else:
                h = sage_layer(h, operators["r_sym"], params, cfg.activation)
            if cfg.l2_normalize:
                h = ad.row_l2_normalize(h)
            outs.append(h)
        if cfg.jk == "max" and len(outs) > 1:
            z = ad.rowwise_max_pool(outs)
        elif cfg.jk == "cat":
            z = ad.concat_cols(outs)
        else:
            z = outs[-1]
        return ad.add_rowvec(ad.matmul(z, self.decoder_w), self.decoder_b)


def save_checkpoint(path, model: DirModel) -> None:
    """Flat CSV: name, rows, cols, then the row-major values."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for name, p in model.named_parameters():
            rows, cols = p.value.shape
            writer.writerow([name, rows, cols] + [repr(float(v)) for v in p.value.reshape(-1)])


def load_checkpoint(path, model: DirModel) -> None:
    """Restore parameters in place; names and shapes must match exactly."""
    wanted = dict(model.named_parameters())
    seen = set()
    with open(path) as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            name = row[0]
            if name not in wanted:
                raise IngestionError(f"{path}:{lineno}: unknown parameter {name!r}")
            rows, cols = int(row[1]), int(row[2])
            vals = np.asarray([float(v) for v in row[3:]], dtype=np.float64)
            if vals.size != rows * cols or wanted[name].value.shape != (rows, cols):
                raise IngestionError(f"{path}:{lineno}: shape mismatch for {name!r}")
            wanted[name].value[...] = vals.reshape(rows, cols)
            seen.add(name)
    missing = set(wanted) - seen
    if missing:
        raise IngestionError(f"{path}: missing parameters {sorted(missing)}")
