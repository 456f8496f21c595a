"""The classifier: word and distance embeddings into a Bi-LSTM, attention over
the hidden states conditioned on distance and aspect, then a 4-way softmax.

Attention scores each timestep as w_s . tanh(w_hpa [h_t; p_t; a]) where h_t is
the Bi-LSTM state, p_t the tree-distance embedding and a the pooled aspect
vector broadcast to every step. Padded positions are masked out of the
softmax, so they contribute exactly nothing to the context vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .conllu import Token, make_tree
from .dataset import PolarityLabel, ReviewInstance
from .embeddings import PAD_INDEX, EmbeddingTable, PositionTable
from .errors import DimensionMismatchError, EmptyAspectError, PadTooSmallError
from .nn.lstm import BiLstmCache, LstmCellParams, bilstm_backward, bilstm_forward
from .nn.ops import Param, cross_entropy, dropout_mask
from .position import PositionVector, position_vector, to_embedding_indices

N_CLASSES = len(PolarityLabel)
POOLINGS = ("mean", "sum", "head")


@dataclass
class AttentionParams:
    """Score weights. w_hpa maps [h_t; p_t; a] into d_w units, w_s reads them out."""

    w_hpa: Param  # (d_w, 2*d_h + d_p + d_e)
    w_s: Param    # (1, d_w)

    @classmethod
    def create(cls, d_w: int, d_e: int, d_h: int, d_p: int,
               rng: np.random.Generator, scale: float = 0.08) -> "AttentionParams":
        return cls(w_hpa=Param.uniform(rng, (d_w, 2 * d_h + d_p + d_e), scale),
                   w_s=Param.uniform(rng, (1, d_w), scale))

    @property
    def d_w(self) -> int:
        return self.w_hpa.value.shape[0]


@dataclass
class ModelParams:
    """Every trainable tensor of the model."""

    words: EmbeddingTable
    positions: PositionTable
    fwd: LstmCellParams
    bwd: LstmCellParams
    attn: AttentionParams
    cls_w: Param  # (N_CLASSES, 2*d_h)
    cls_b: Param  # (N_CLASSES,)

    @property
    def d_e(self) -> int:
        return self.words.dim

    @property
    def d_h(self) -> int:
        return self.fwd.d_h

    @property
    def d_p(self) -> int:
        return self.positions.dim

    def blocks(self) -> dict[str, Param]:
        """Named tensors in a fixed order (the checkpoint layout)."""
        out = {"word_emb": self.words.weights, "pos_emb": self.positions.weights}
        out.update(self.fwd.blocks("lstm_fwd"))
        out.update(self.bwd.blocks("lstm_bwd"))
        out["attn.w_hpa"] = self.attn.w_hpa
        out["attn.w_s"] = self.attn.w_s
        out["cls.w"] = self.cls_w
        out["cls.b"] = self.cls_b
        return out

    @classmethod
    def create(cls, vocab_forms: Sequence[str], d_e: int, d_h: int, d_p: int,
               d_w: int, max_distance: int, rng: np.random.Generator,
               scale: float = 0.08) -> "ModelParams":
        return cls(
            words=EmbeddingTable.build(vocab_forms, d_e, rng, scale),
            positions=PositionTable.create(max_distance, d_p, rng, scale),
            fwd=LstmCellParams.create(d_e, d_h, rng, scale),
            bwd=LstmCellParams.create(d_e, d_h, rng, scale),
            attn=AttentionParams.create(d_w, d_e, d_h, d_p, rng, scale),
            cls_w=Param.uniform(rng, (N_CLASSES, 2 * d_h), scale),
            cls_b=Param.uniform(rng, (N_CLASSES,), scale),
        )


def _pool_weights(m: int, pooling: str) -> np.ndarray:
    if m < 1:
        raise EmptyAspectError("aspect span has no tokens")
    if pooling == "mean":
        return np.full(m, 1.0 / m)
    if pooling == "sum":
        return np.ones(m)
    if pooling == "head":
        w = np.zeros(m)
        w[0] = 1.0  # span-initial token stands in for the phrase
        return w
    raise ValueError(f"unknown pooling {pooling!r}; expected one of {POOLINGS}")


def aspect_vector(table: EmbeddingTable, forms: Sequence[str],
                  pooling: str = "mean") -> np.ndarray:
    """Pool the aspect-token embeddings into one conditioning vector."""
    if len(forms) == 0:
        raise EmptyAspectError("aspect span has no tokens")
    rows = table.indices(forms)
    return _pool_weights(len(rows), pooling) @ table.weights.value[rows]


def _attention_forward(hs: np.ndarray, ps: np.ndarray, a: np.ndarray,
                       attn: AttentionParams, mask: np.ndarray,
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t_len = hs.shape[0]
    if ps.shape[0] != t_len or mask.shape[0] != t_len:
        raise DimensionMismatchError("hs, ps and mask must agree on sequence length")
    u = np.concatenate([hs, ps, np.tile(a, (t_len, 1))], axis=1)
    if u.shape[1] != attn.w_hpa.value.shape[1]:
        raise DimensionMismatchError(
            f"score input width {u.shape[1]} vs w_hpa columns "
            f"{attn.w_hpa.value.shape[1]}")
    v = np.tanh(u @ attn.w_hpa.value.T)   # (T, d_w)
    scores = v @ attn.w_s.value[0]        # (T,)
    scores = np.where(mask, scores, -np.inf)
    return scores, u, v


def attention_scores(hs: np.ndarray, ps: np.ndarray, a: np.ndarray,
                     attn: AttentionParams, mask: np.ndarray) -> np.ndarray:
    """Raw attention scores; masked positions come back as -inf."""
    scores, _, _ = _attention_forward(hs, ps, a, attn, mask)
    return scores


def attention_weights(scores: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Masked softmax; masked entries are exactly 0 and the rest sum to 1."""
    if not mask.any():
        raise ValueError("at least one unmasked position is required")
    s = np.where(mask, scores, -np.inf)
    e = np.exp(s - s[mask].max())  # exp(-inf) = 0 exactly at masked entries
    return e / e.sum()


def context_vector(alpha: np.ndarray, hs: np.ndarray) -> np.ndarray:
    """Attention-weighted sum of the per-timestep hidden states."""
    return alpha @ hs


@dataclass
class ForwardTrace:
    """Everything one forward pass computed, kept for the backward pass."""

    word_idx: np.ndarray     # (T,) int64, PAD-filled tail
    pos_idx: np.ndarray      # (T,) int64
    mask: np.ndarray         # (T,) bool
    n: int                   # count of real tokens
    aspect_rows: np.ndarray  # (m,) embedding rows of the aspect tokens
    pool_w: np.ndarray       # (m,) pooling weights behind the aspect vector
    hs: np.ndarray           # (T, 2*d_h)
    lstm_cache: BiLstmCache
    u: np.ndarray            # (T, 2*d_h + d_p + d_e) score inputs
    v: np.ndarray            # (T, d_w)
    scores: np.ndarray
    alpha: np.ndarray
    context: np.ndarray
    logits: np.ndarray


def forward_arrays(params: ModelParams, word_idx: np.ndarray, pos_idx: np.ndarray,
                   mask: np.ndarray, aspect_rows: np.ndarray, *,
                   pooling: str = "mean", training: bool = False,
                   rng: np.random.Generator | None = None,
                   dropout: float = 0.0, recurrent_dropout: float = 0.0,
                   ) -> ForwardTrace:
    """Forward pass over pre-built index arrays (the batch-time entry point)."""
    if len(aspect_rows) == 0:
        raise EmptyAspectError("aspect span has no tokens")
    xs = params.words.weights.value[word_idx]       # (T, d_e)
    ps = params.positions.weights.value[pos_idx]    # (T, d_p)
    pool_w = _pool_weights(len(aspect_rows), pooling)
    a = pool_w @ params.words.weights.value[aspect_rows]
    fwd_drop: tuple[np.ndarray | None, np.ndarray | None] = (None, None)
    bwd_drop: tuple[np.ndarray | None, np.ndarray | None] = (None, None)
    if training and (dropout > 0.0 or recurrent_dropout > 0.0):
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")

        def draw() -> tuple[np.ndarray | None, np.ndarray | None]:
            x_m = dropout_mask((params.d_e,), dropout, rng) if dropout > 0.0 else None
            h_m = (dropout_mask((params.d_h,), recurrent_dropout, rng)
                   if recurrent_dropout > 0.0 else None)
            return x_m, h_m

        fwd_drop = draw()
        bwd_drop = draw()
    hs, lstm_cache = bilstm_forward(params.fwd, params.bwd, xs, mask,
                                    fwd_drop, bwd_drop)
    scores, u, v = _attention_forward(hs, ps, a, params.attn, mask)
    alpha = attention_weights(scores, mask)
    ctx = alpha @ hs
    logits = params.cls_w.value @ ctx + params.cls_b.value
    return ForwardTrace(word_idx=word_idx, pos_idx=pos_idx, mask=mask,
                        n=int(mask.sum()), aspect_rows=aspect_rows, pool_w=pool_w,
                        hs=hs, lstm_cache=lstm_cache, u=u, v=v, scores=scores,
                        alpha=alpha, context=ctx, logits=logits)


def forward(params: ModelParams, inst: ReviewInstance,
            pv: PositionVector | None = None, *, pad_to: int | None = None,
            pooling: str = "mean", training: bool = False,
            rng: np.random.Generator | None = None,
            dropout: float = 0.0, recurrent_dropout: float = 0.0) -> ForwardTrace:
    """Classify one instance, optionally right-padded to ``pad_to`` steps."""
    n = inst.tree.n
    if pv is None:
        pv = position_vector(inst.tree, inst.aspect_span,
                             params.positions.max_distance)
    if pv.n != n:
        raise DimensionMismatchError(
            f"position vector length {pv.n} vs sentence length {n}")
    if pv.clamp != params.positions.max_distance:
        raise DimensionMismatchError(
            f"position vector clamp {pv.clamp} vs table max distance "
            f"{params.positions.max_distance}")
    t_len = n if pad_to is None else pad_to
    if t_len < n:
        raise PadTooSmallError(f"pad_to {t_len} shorter than sentence length {n}")
    word_idx = np.full(t_len, PAD_INDEX, dtype=np.int64)
    word_idx[:n] = params.words.indices(inst.tree.forms())
    pos_idx = to_embedding_indices(pv, t_len)
    mask = np.zeros(t_len, dtype=bool)
    mask[:n] = True
    s, e = inst.aspect_span
    aspect_rows = word_idx[s - 1:e].copy()
    return forward_arrays(params, word_idx, pos_idx, mask, aspect_rows,
                          pooling=pooling, training=training, rng=rng,
                          dropout=dropout, recurrent_dropout=recurrent_dropout)


def backward(params: ModelParams, trace: ForwardTrace,
             gold: PolarityLabel | int) -> float:
    """Accumulate d loss / d params for one instance; returns the loss."""
    gold_code = gold.value if isinstance(gold, PolarityLabel) else int(gold)
    loss, dlogits = cross_entropy(trace.logits, gold_code)
    params.cls_w.grad += np.outer(dlogits, trace.context)
    params.cls_b.grad += dlogits
    dctx = params.cls_w.value.T @ dlogits
    # context = alpha @ hs
    dalpha = trace.hs @ dctx
    dhs = np.outer(trace.alpha, dctx)
    # softmax backward; masked alphas are exactly 0, so their rows vanish
    dscores = trace.alpha * (dalpha - float(trace.alpha @ dalpha))
    # score_t = w_s . tanh(w_hpa u_t)
    dv = np.outer(dscores, params.attn.w_s.value[0])
    dpre = dv * (1.0 - trace.v ** 2)
    params.attn.w_s.grad += (dscores @ trace.v)[None, :]
    params.attn.w_hpa.grad += dpre.T @ trace.u
    du = dpre @ params.attn.w_hpa.value
    width = trace.hs.shape[1]
    d_p = params.d_p
    dhs += du[:, :width]
    dps = du[:, width:width + d_p]
    da = du[:, width + d_p:].sum(axis=0)
    np.add.at(params.positions.weights.grad, trace.pos_idx, dps)
    np.add.at(params.words.weights.grad, trace.aspect_rows,
              trace.pool_w[:, None] * da[None, :])
    dxs = bilstm_backward(params.fwd, params.bwd, trace.lstm_cache, dhs)
    np.add.at(params.words.weights.grad, trace.word_idx, dxs)
    return loss


def predict(params: ModelParams, inst: ReviewInstance,
            pv: PositionVector | None = None, *, pooling: str = "mean",
            ) -> tuple[PolarityLabel, np.ndarray]:
    """Most probable class plus the attention weights over the real tokens.

    Ties resolve toward the lower class code (argmax takes the first max).
    """
    trace = forward(params, inst, pv, pooling=pooling)
    code = int(np.argmax(trace.logits))
    return PolarityLabel(code), trace.alpha[:trace.n].copy()


def build_gradcheck_problem(d_e: int = 8, d_h: int = 5, d_p: int = 3, d_w: int = 7,
                            t_x: int = 6, seed: int = 7, pooling: str = "mean",
                            ) -> tuple[Callable[[], float], ModelParams]:
    """A tiny deterministic model and instance wired for gradient checking.

    Returns ``(loss_fn, params)`` where ``loss_fn`` runs forward plus backward
    on a fixed instance (dropout off, two trailing pads) and returns the loss,
    accumulating gradients as it goes.
    """
    if t_x < 3:
        raise ValueError("gradcheck sentence needs at least 3 tokens")
    rng = np.random.default_rng(seed)
    forms = [f"w{k}" for k in range(t_x)]
    tokens = [Token(index=k + 1, form=forms[k], head=k, deprel="dep")
              for k in range(t_x)]  # a chain; token 1 is the root
    tree = make_tree(tokens)
    span = (2, 3)  # multiword span exercises the pooling path
    inst = ReviewInstance(tree=tree, aspect_span=span, label=PolarityLabel.NEUTRAL)
    max_distance = max(4, t_x // 2)
    params = ModelParams.create(forms + ["extra"], d_e, d_h, d_p, d_w,
                                max_distance, rng)
    pv = position_vector(tree, span, max_distance)
    gold = PolarityLabel.NEGATIVE

    def loss_fn() -> float:
        trace = forward(params, inst, pv, pad_to=t_x + 2, pooling=pooling)
        return backward(params, trace, gold)

    return loss_fn, params
