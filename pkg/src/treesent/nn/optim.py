"""RMSprop parameter update."""

from __future__ import annotations

import numpy as np

from .ops import Param


def rmsprop_step(p: Param, lr: float, rho: float = 0.9, eps: float = 1e-8) -> None:
    """cache <- rho*cache + (1-rho)*grad^2; value -= lr*grad/sqrt(cache+eps).

    The gradient is cleared afterwards so accumulation restarts per batch.
    """
    g = p.grad
    p.cache *= rho
    p.cache += (1.0 - rho) * g * g
    p.value -= lr * g / np.sqrt(p.cache + eps)
    p.grad[...] = 0.0
