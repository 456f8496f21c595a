"""LSTM cell and masked bidirectional sequence driver, forward and backward.

Weights are kept per gate; every gate reads the concatenation [x; h_prev].
Masked (padding) steps carry h and c through unchanged, so appending pads
never changes the states computed for real tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError
from .ops import Param, sigmoid

GATES = ("i", "f", "o", "g")


@dataclass
class LstmCellParams:
    """Input, forget, output and candidate gate weights for one direction."""

    w_i: Param
    w_f: Param
    w_o: Param
    w_g: Param
    b_i: Param
    b_f: Param
    b_o: Param
    b_g: Param

    @classmethod
    def create(cls, d_in: int, d_h: int, rng: np.random.Generator,
               scale: float = 0.08) -> "LstmCellParams":
        kw = {}
        for g in GATES:
            kw[f"w_{g}"] = Param.uniform(rng, (d_h, d_in + d_h), scale)
            kw[f"b_{g}"] = Param.uniform(rng, (d_h,), scale)
        kw["b_f"].value[...] = 1.0  # start with an open forget gate
        return cls(**kw)

    @property
    def d_h(self) -> int:
        return self.w_i.value.shape[0]

    @property
    def d_in(self) -> int:
        return self.w_i.value.shape[1] - self.d_h

    def blocks(self, prefix: str) -> dict[str, Param]:
        out = {}
        for g in GATES:
            out[f"{prefix}.w_{g}"] = getattr(self, f"w_{g}")
            out[f"{prefix}.b_{g}"] = getattr(self, f"b_{g}")
        return out


@dataclass
class LstmStepCache:
    """Intermediates of one cell step, kept for the backward pass."""

    z: np.ndarray       # [x; h_prev] after any dropout
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c_prev: np.ndarray
    tanh_c: np.ndarray


def lstm_cell_forward(p: LstmCellParams, x: np.ndarray, h_prev: np.ndarray,
                      c_prev: np.ndarray) -> tuple[np.ndarray, np.ndarray, LstmStepCache]:
    """One gated step: c = f*c_prev + i*g, h = o*tanh(c)."""
    if x.shape != (p.d_in,) or h_prev.shape != (p.d_h,) or c_prev.shape != (p.d_h,):
        raise DimensionMismatchError(
            f"cell expects x ({p.d_in},), h and c ({p.d_h},); "
            f"got {x.shape}, {h_prev.shape}, {c_prev.shape}")
    z = np.concatenate([x, h_prev])
    i = sigmoid(p.w_i.value @ z + p.b_i.value)
    f = sigmoid(p.w_f.value @ z + p.b_f.value)
    o = sigmoid(p.w_o.value @ z + p.b_o.value)
    g = np.tanh(p.w_g.value @ z + p.b_g.value)
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    return h, c, LstmStepCache(z=z, i=i, f=f, o=o, g=g, c_prev=c_prev, tanh_c=tanh_c)


def lstm_cell_backward(p: LstmCellParams, cache: LstmStepCache, dh: np.ndarray,
                       dc_next: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Accumulate gate-weight grads for one step; returns (dx, dh_prev, dc_prev)."""
    dc = dc_next + dh * cache.o * (1.0 - cache.tanh_c ** 2)
    d_pre_i = dc * cache.g * cache.i * (1.0 - cache.i)
    d_pre_f = dc * cache.c_prev * cache.f * (1.0 - cache.f)
    d_pre_o = dh * cache.tanh_c * cache.o * (1.0 - cache.o)
    d_pre_g = dc * cache.i * (1.0 - cache.g ** 2)
    p.w_i.grad += np.outer(d_pre_i, cache.z)
    p.w_f.grad += np.outer(d_pre_f, cache.z)
    p.w_o.grad += np.outer(d_pre_o, cache.z)
    p.w_g.grad += np.outer(d_pre_g, cache.z)
    p.b_i.grad += d_pre_i
    p.b_f.grad += d_pre_f
    p.b_o.grad += d_pre_o
    p.b_g.grad += d_pre_g
    dz = (p.w_i.value.T @ d_pre_i + p.w_f.value.T @ d_pre_f
          + p.w_o.value.T @ d_pre_o + p.w_g.value.T @ d_pre_g)
    d_in = p.d_in
    return dz[:d_in], dz[d_in:], dc * cache.f


@dataclass
class SequenceCache:
    steps: list[LstmStepCache | None]       # None at masked steps
    x_drop: np.ndarray | None               # variational input mask (d_in,)
    h_drop: np.ndarray | None               # variational recurrent mask (d_h,)


def lstm_sequence_forward(p: LstmCellParams, xs: np.ndarray, mask: np.ndarray,
                          x_drop: np.ndarray | None = None,
                          h_drop: np.ndarray | None = None,
                          ) -> tuple[np.ndarray, SequenceCache]:
    """Run the cell along ``xs`` (T, d_in); masked steps carry state through.

    ``x_drop`` and ``h_drop`` are dropout masks shared across all timesteps
    of the sequence (variational dropout); ``h_drop`` applies to the h_prev
    fed back into the cell, not to the emitted hidden states.
    """
    t_len = xs.shape[0]
    if xs.ndim != 2 or xs.shape[1] != p.d_in:
        raise DimensionMismatchError(f"xs must be (T, {p.d_in}), got {xs.shape}")
    if mask.shape != (t_len,):
        raise DimensionMismatchError(f"mask must be ({t_len},), got {mask.shape}")
    h = np.zeros(p.d_h)
    c = np.zeros(p.d_h)
    hs = np.zeros((t_len, p.d_h))
    steps: list[LstmStepCache | None] = []
    for t in range(t_len):
        if mask[t]:
            x_in = xs[t] * x_drop if x_drop is not None else xs[t]
            h_in = h * h_drop if h_drop is not None else h
            h, c, cache = lstm_cell_forward(p, x_in, h_in, c)
            steps.append(cache)
        else:
            steps.append(None)
        hs[t] = h
    return hs, SequenceCache(steps=steps, x_drop=x_drop, h_drop=h_drop)


def lstm_sequence_backward(p: LstmCellParams, cache: SequenceCache,
                           dhs: np.ndarray) -> np.ndarray:
    """Backpropagate through time; returns grads wrt the raw (pre-dropout) xs."""
    t_len = len(cache.steps)
    dxs = np.zeros((t_len, p.d_in))
    dh_carry = np.zeros(p.d_h)
    dc_carry = np.zeros(p.d_h)
    for t in range(t_len - 1, -1, -1):
        dh = dhs[t] + dh_carry
        step = cache.steps[t]
        if step is None:
            dh_carry = dh  # identity carry through the masked step
            continue
        dx, dh_prev, dc_carry = lstm_cell_backward(p, step, dh, dc_carry)
        dxs[t] = dx * cache.x_drop if cache.x_drop is not None else dx
        dh_carry = dh_prev * cache.h_drop if cache.h_drop is not None else dh_prev
    return dxs


@dataclass
class BiLstmCache:
    fwd: SequenceCache
    bwd: SequenceCache  # computed over the reversed sequence


def bilstm_forward(fwd: LstmCellParams, bwd: LstmCellParams, xs: np.ndarray,
                   mask: np.ndarray,
                   fwd_drop: tuple[np.ndarray | None, np.ndarray | None] = (None, None),
                   bwd_drop: tuple[np.ndarray | None, np.ndarray | None] = (None, None),
                   ) -> tuple[np.ndarray, BiLstmCache]:
    """Per-timestep concatenation [h_fwd; h_bwd], the bwd pass reading xs reversed.

    Output shape is (T, 2*d_h).
    """
    if fwd.d_h != bwd.d_h or fwd.d_in != bwd.d_in:
        raise DimensionMismatchError("forward and backward cells disagree on dims")
    hs_f, cache_f = lstm_sequence_forward(fwd, xs, mask, *fwd_drop)
    hs_b_rev, cache_b = lstm_sequence_forward(bwd, xs[::-1], mask[::-1], *bwd_drop)
    hs = np.concatenate([hs_f, hs_b_rev[::-1]], axis=1)
    return hs, BiLstmCache(fwd=cache_f, bwd=cache_b)


def bilstm_backward(fwd: LstmCellParams, bwd: LstmCellParams, cache: BiLstmCache,
                    dhs: np.ndarray) -> np.ndarray:
    """Split dhs into the two directions and add up the input grads."""
    d_h = fwd.d_h
    dxs_f = lstm_sequence_backward(fwd, cache.fwd, dhs[:, :d_h])
    dxs_b = lstm_sequence_backward(bwd, cache.bwd, dhs[::-1, d_h:])
    return dxs_f + dxs_b[::-1]
