"""Dense and GRU building blocks used by every network in the lab.

Parameters are initialized uniformly in +-1/sqrt(fan_in). Layers accept
either a single vector or a batch (leading dimension) and run entirely on
the autodiff tensors from :mod:`marlab.nn.tensor`.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor

ACTIVATIONS = ("identity", "relu", "tanh", "sigmoid", "abs")


def _init(rng, shape, fan_in):
    bound = 1.0 / np.sqrt(fan_in)
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


def _apply_activation(t, act):
    if act == "identity":
        return t
    if act == "relu":
        return t.relu()
    if act == "tanh":
        return t.tanh()
    if act == "sigmoid":
        return t.sigmoid()
    if act == "abs":
        return t.abs()
    raise ValueError(f"unknown activation {act!r}")


class Dense:
    """Affine layer ``act(W x + b)`` with weight shaped [out, in]."""

    def __init__(self, in_dim, out_dim, act="identity", rng=None):
        if act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {act!r}")
        rng = rng if rng is not None else np.random.default_rng()
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.act = act
        self.weight = _init(rng, (out_dim, in_dim), in_dim)
        self.bias = _init(rng, (out_dim,), in_dim)

    def __call__(self, x):
        if not isinstance(x, Tensor):
            x = Tensor(x)
        squeeze = x.ndim == 1
        if squeeze:
            x = x.reshape(1, -1)
        if x.shape[-1] != self.in_dim:
            raise ShapeError(
                f"dense layer expects input dim {self.in_dim}, got {x.shape[-1]}"
            )
        out = x @ self.weight.T2 + self.bias
        out = _apply_activation(out, self.act)
        if squeeze:
            out = out.reshape(self.out_dim)
        return out

    def named_params(self, prefix=""):
        return [(prefix + "weight", self.weight), (prefix + "bias", self.bias)]


class GRUCell:
    """Single-step gated recurrent unit.

    Update/reset gates and candidate each carry input-path and hidden-path
    weights and biases. The reset gate multiplies the hidden path before
    the candidate tanh, and the new state is ``(1 - z) * n + z * h``.
    """

    def __init__(self, in_dim, hidden_dim, rng=None):
        rng = rng if rng is not None else np.random.default_rng()
        self.in_dim = in_dim
        self.hidden_dim = hidden_dim
        h = hidden_dim
        self.w_ir = _init(rng, (h, in_dim), in_dim)
        self.w_iz = _init(rng, (h, in_dim), in_dim)
        self.w_in = _init(rng, (h, in_dim), in_dim)
        self.w_hr = _init(rng, (h, h), h)
        self.w_hz = _init(rng, (h, h), h)
        self.w_hn = _init(rng, (h, h), h)
        self.b_ir = _init(rng, (h,), in_dim)
        self.b_iz = _init(rng, (h,), in_dim)
        self.b_in = _init(rng, (h,), in_dim)
        self.b_hr = _init(rng, (h,), h)
        self.b_hz = _init(rng, (h,), h)
        self.b_hn = _init(rng, (h,), h)

    def __call__(self, x, h):
        if not isinstance(x, Tensor):
            x = Tensor(x)
        if not isinstance(h, Tensor):
            h = Tensor(h)
        squeeze = x.ndim == 1
        if squeeze:
            x = x.reshape(1, -1)
            h = h.reshape(1, -1)
        if x.shape[-1] != self.in_dim or h.shape[-1] != self.hidden_dim:
            raise ShapeError(
                f"gru expects input {self.in_dim} and hidden {self.hidden_dim}, "
                f"got {x.shape[-1]} and {h.shape[-1]}"
            )
        r = (x @ self.w_ir.T2 + self.b_ir + h @ self.w_hr.T2 + self.b_hr).sigmoid()
        z = (x @ self.w_iz.T2 + self.b_iz + h @ self.w_hz.T2 + self.b_hz).sigmoid()
        n = (x @ self.w_in.T2 + self.b_in + r * (h @ self.w_hn.T2 + self.b_hn)).tanh()
        out = (1.0 - z) * n + z * h
        if squeeze:
            out = out.reshape(self.hidden_dim)
        return out

    def init_hidden(self, batch=None):
        if batch is None:
            return Tensor(np.zeros(self.hidden_dim))
        return Tensor(np.zeros((batch, self.hidden_dim)))

    def named_params(self, prefix=""):
        names = ("w_ir", "w_iz", "w_in", "w_hr", "w_hz", "w_hn",
                 "b_ir", "b_iz", "b_in", "b_hr", "b_hz", "b_hn")
        return [(prefix + n, getattr(self, n)) for n in names]


class Sequential:
    """Chain of layers applied in order."""

    def __init__(self, *layers):
        self.layers = list(layers)

    def __call__(self, x):
        for layer in self.layers:
            x = layer(x)
        return x

    def named_params(self, prefix=""):
        out = []
        for i, layer in enumerate(self.layers):
            out.extend(layer.named_params(f"{prefix}{i}."))
        return out


def collect_params(named):
    """Flatten a named_params() listing into the bare tensors."""
    return [t for _, t in named]
