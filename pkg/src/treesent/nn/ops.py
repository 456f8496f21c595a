"""Parameters, activations, loss and dropout, all in 64-bit floats."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadRateError


@dataclass
class Param:
    """A trainable tensor with its gradient and RMSprop accumulator.

    All three arrays share one shape; ``grad`` is cleared by the optimizer
    step so each batch starts from zero.
    """

    value: np.ndarray
    grad: np.ndarray
    cache: np.ndarray

    @classmethod
    def of(cls, value: np.ndarray) -> "Param":
        value = np.array(value, dtype=np.float64)
        return cls(value=value, grad=np.zeros_like(value), cache=np.zeros_like(value))

    @classmethod
    def zeros(cls, *shape: int) -> "Param":
        return cls.of(np.zeros(shape))

    @classmethod
    def uniform(cls, rng: np.random.Generator, shape: tuple[int, ...],
                scale: float = 0.08) -> "Param":
        return cls.of(rng.uniform(-scale, scale, size=shape))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def zero_grad(self) -> None:
        self.grad[...] = 0.0


def sigmoid(x: np.ndarray) -> np.ndarray:
    # Clipping keeps exp() finite; the saturation error is below float64 noise.
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def softmax(v: np.ndarray) -> np.ndarray:
    """Exponential normalization with max subtraction for stability."""
    z = np.asarray(v, dtype=np.float64)
    e = np.exp(z - z.max())
    return e / e.sum()


def cross_entropy(logits: np.ndarray, gold: int) -> tuple[float, np.ndarray]:
    """Negative log-likelihood of class ``gold`` and its gradient wrt logits.

    Returns ``(loss, probs - onehot(gold))``.
    """
    z = np.asarray(logits, dtype=np.float64)
    m = z.max()
    shifted = np.exp(z - m)
    total = shifted.sum()
    loss = float(m + np.log(total) - z[gold])
    dlogits = shifted / total
    dlogits[gold] -= 1.0
    return loss, dlogits


def _check_rate(rate: float) -> None:
    if not 0.0 <= rate < 1.0:
        raise BadRateError(f"dropout rate {rate} outside [0, 1)")


def dropout_mask(shape: tuple[int, ...] | int, rate: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Inverted-dropout mask: zeros with probability ``rate``, survivors
    scaled by 1/(1-rate) so the expectation is unchanged."""
    _check_rate(rate)
    keep = rng.random(shape) >= rate
    return keep.astype(np.float64) / (1.0 - rate)


def dropout(v: np.ndarray, rate: float, training: bool,
            rng: np.random.Generator | None = None) -> np.ndarray:
    """Apply inverted dropout in training mode; identity at inference."""
    _check_rate(rate)
    v = np.asarray(v, dtype=np.float64)
    if not training or rate == 0.0:
        return v
    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    return v * dropout_mask(v.shape, rate, rng)
