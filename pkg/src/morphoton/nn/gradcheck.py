"""Analytic-vs-numeric gradient verification for the differentiable core."""

from __future__ import annotations

import numpy as np

from ..encoding import EncodedSample
from .model import Seq2SeqModel


def grad_check(
    model: Seq2SeqModel,
    encoded: EncodedSample,
    epsilon: float = 1e-5,
    param_names: list[str] | None = None,
    max_entries_per_param: int | None = 50,
    seed: int = 0,
) -> float:
    """Max relative error between backprop and central finite differences.

    Checks every entry of each selected parameter, or a seeded random
    subset when the parameter has more entries than the cap. Relative
    error uses a small floor so near-zero gradients compare on absolute
    terms.
    """
    names = param_names if param_names is not None else sorted(model.params)
    model.zero_grads()
    model.sample_loss(encoded).backward()
    analytic = {
        name: (model.params[name].grad.copy() if model.params[name].grad is not None
               else np.zeros_like(model.params[name].data))
        for name in names
    }
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in names:
        tensor = model.params[name]
        flat = tensor.data.reshape(-1)
        n = flat.size
        if max_entries_per_param is not None and n > max_entries_per_param:
            entries = rng.choice(n, size=max_entries_per_param, replace=False)
        else:
            entries = np.arange(n)
        a_flat = analytic[name].reshape(-1)
        for idx in entries:
            orig = flat[idx]
            flat[idx] = orig + epsilon
            up = float(model.sample_loss(encoded).data)
            flat[idx] = orig - epsilon
            down = float(model.sample_loss(encoded).data)
            flat[idx] = orig
            numeric = (up - down) / (2 * epsilon)
            denom = max(abs(a_flat[idx]), abs(numeric), 1e-5)
            worst = max(worst, abs(a_flat[idx] - numeric) / denom)
    return worst
