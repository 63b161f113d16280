"""Finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np

from ..errors import NumericError


def numeric_gradient(f, param, eps=1e-5):
    """Central-difference gradient of scalar ``f()`` w.r.t. one parameter tensor."""
    grad = np.zeros_like(param.data)
    flat = param.data.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        f_plus = float(f().data)
        flat[i] = orig - eps
        f_minus = float(f().data)
        flat[i] = orig
        gflat[i] = (f_plus - f_minus) / (2.0 * eps)
    return grad


def grad_check(f, params, eps=1e-5):
    """Max relative error between analytic and central-difference gradients.

    ``f`` is a closure evaluating the loss from the current parameter values;
    the relative error is |analytic - numeric| / max(1, |numeric|), maximized
    over every entry of every parameter.
    """
    for p in params:
        p.grad = None
    loss = f()
    if not np.all(np.isfinite(loss.data)):
        raise NumericError("loss is not finite at the evaluation point")
    loss.backward()
    analytic = [p.grad.copy() if p.grad is not None else np.zeros_like(p.data)
                for p in params]
    worst = 0.0
    for p, a in zip(params, analytic):
        n = numeric_gradient(f, p, eps)
        if not np.all(np.isfinite(n)):
            raise NumericError("numeric gradient is not finite")
        err = np.abs(a - n) / np.maximum(1.0, np.abs(n))
        worst = max(worst, float(err.max()) if err.size else 0.0)
    for p in params:
        p.grad = None
    return worst
