"""Minimal float64 kernel: explicit forward and backward passes for every op."""

from .gradcheck import BlockReport, GradCheckReport, grad_check
from .lstm import (
    BiLstmCache,
    LstmCellParams,
    LstmStepCache,
    bilstm_backward,
    bilstm_forward,
    lstm_cell_backward,
    lstm_cell_forward,
    lstm_sequence_backward,
    lstm_sequence_forward,
)
from .ops import Param, cross_entropy, dropout, dropout_mask, sigmoid, softmax
from .optim import rmsprop_step

__all__ = [
    "BiLstmCache",
    "BlockReport",
    "GradCheckReport",
    "LstmCellParams",
    "LstmStepCache",
    "Param",
    "bilstm_backward",
    "bilstm_forward",
    "cross_entropy",
    "dropout",
    "dropout_mask",
    "grad_check",
    "lstm_cell_backward",
    "lstm_cell_forward",
    "lstm_sequence_backward",
    "lstm_sequence_forward",
    "rmsprop_step",
    "sigmoid",
    "softmax",
]
