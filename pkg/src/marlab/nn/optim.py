"""RMSprop and Adam, the two optimizers the training configs prescribe."""

from __future__ import annotations

import numpy as np

from ..errors import NumericError, ShapeError


class _Optimizer:
    def __init__(self, params):
        self.params = list(params)
        self.step_count = 0

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def _gather_grads(self):
        grads = []
        for p in self.params:
            g = p.grad if p.grad is not None else np.zeros_like(p.data)
            if g.shape != p.data.shape:
                raise ShapeError("gradient shape does not match parameter")
            if not np.all(np.isfinite(g)):
                raise NumericError("non-finite gradient; parameters left unmodified")
            grads.append(g)
        return grads

    def state_arrays(self, prefix=""):
        """Named accumulator arrays for checkpointing."""
        raise NotImplementedError

    def load_state_arrays(self, arrays, prefix=""):
        raise NotImplementedError


class RMSprop(_Optimizer):
    """Plain RMSprop: s <- alpha*s + (1-alpha)*g^2, step by g/sqrt(s + eps)."""

    def __init__(self, params, lr=0.001, alpha=0.99, eps=1e-5):
        super().__init__(params)
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        self.lr = lr
        self.alpha = alpha
        self.eps = eps
        self.square_avg = [np.zeros_like(p.data) for p in self.params]

    def step(self):
        grads = self._gather_grads()
        for p, g, s in zip(self.params, grads, self.square_avg):
            s *= self.alpha
            s += (1.0 - self.alpha) * g * g
            p.data -= self.lr * g / np.sqrt(s + self.eps)
        self.step_count += 1

    def state_arrays(self, prefix=""):
        return {f"{prefix}sq.{i}": s for i, s in enumerate(self.square_avg)}

    def load_state_arrays(self, arrays, prefix=""):
        for i in range(len(self.square_avg)):
            self.square_avg[i] = arrays[f"{prefix}sq.{i}"].copy()


class Adam(_Optimizer):
    """Adam with standard bias correction."""

    def __init__(self, params, lr=0.001, betas=(0.9, 0.999), eps=1e-8):
        super().__init__(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self):
        grads = self._gather_grads()
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1**t
        bc2 = 1.0 - self.beta2**t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.data -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def state_arrays(self, prefix=""):
        out = {f"{prefix}m.{i}": m for i, m in enumerate(self.m)}
        out.update({f"{prefix}v.{i}": v for i, v in enumerate(self.v)})
        return out

    def load_state_arrays(self, arrays, prefix=""):
        for i in range(len(self.m)):
            self.m[i] = arrays[f"{prefix}m.{i}"].copy()
            self.v[i] = arrays[f"{prefix}v.{i}"].copy()


def make_optimizer(kind, params, lr, alpha=0.99, eps=1e-5):
    if kind == "rmsprop":
        return RMSprop(params, lr=lr, alpha=alpha, eps=eps)
    if kind == "adam":
        return Adam(params, lr=lr)
    raise ValueError(f"unknown optimizer kind {kind!r}")
