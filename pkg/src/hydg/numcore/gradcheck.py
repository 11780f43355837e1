"""Finite-difference validation of tape gradients."""

import numpy as np

from ..errors import ContractError, NumericError
from .tensor import backward


def central_difference_grads(f, params, eps=1e-5):
    """Central-difference gradient of f() w.r.t. every entry of every param.

    `f` must rebuild its forward pass from the params' current .data each
    call; params are perturbed in place and restored.
    """
    grads = []
    for p in params:
        g = np.zeros_like(p.data)
        flat = p.data.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = f().item()
            flat[i] = orig - eps
            lo = f().item()
            flat[i] = orig
            if not (np.isfinite(hi) and np.isfinite(lo)):
                raise NumericError("non-finite loss during finite differences")
            g.ravel()[i] = (hi - lo) / (2.0 * eps)
        grads.append(g)
    return grads


def grad_check(f, params, eps=1e-5):
    """Max over all parameter entries of the relative analytic-vs-numeric error.

    Error per entry: |analytic - central| / max(1, |central|).
    """
    if not params:
        raise ContractError("grad_check needs at least one parameter")
    for p in params:
        p.zero_grad()
    loss = f()
    if loss.data.shape != (1, 1):
        raise ContractError("grad_check target must evaluate to a scalar")
    if not np.isfinite(loss.item()):
        raise NumericError("non-finite loss at the evaluation point")
    backward(loss)
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]
    numeric = central_difference_grads(f, params, eps)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1.0, np.abs(n))
        worst = max(worst, float(np.max(np.abs(a - n) / denom, initial=0.0)))
    return worst
