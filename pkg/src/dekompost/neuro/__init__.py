"""Sequence-labeling engine for neural compound splitting."""

from .io import load_params, load_subword_embeddings, save_params
from .model import (
    BLOCK_ORDER,
    CELL_KINDS,
    PAD,
    PAD_ID,
    UNK,
    UNK_ID,
    Batch,
    LabelerConfig,
    LabelerParams,
    batch_loss,
    build_vocab,
    encode_sequence,
    init_params,
    loss_and_gradients,
    make_batch,
    predict_batch_probs,
    predict_split_probs,
    zero_params,
)
from .optim import AdamState, adam_step, gradient_check, numeric_gradient, relative_error
from .train import EpochRecord, LabeledExample, PrepStats, TrainResult, prepare_examples, split_accuracy_of, train

__all__ = [
    "AdamState",
    "BLOCK_ORDER",
    "Batch",
    "CELL_KINDS",
    "EpochRecord",
    "LabeledExample",
    "LabelerConfig",
    "LabelerParams",
    "PAD",
    "PAD_ID",
    "PrepStats",
    "TrainResult",
    "UNK",
    "UNK_ID",
    "adam_step",
    "batch_loss",
    "build_vocab",
    "encode_sequence",
    "gradient_check",
    "init_params",
    "load_params",
    "load_subword_embeddings",
    "loss_and_gradients",
    "make_batch",
    "numeric_gradient",
    "predict_batch_probs",
    "predict_split_probs",
    "prepare_examples",
    "relative_error",
    "save_params",
    "split_accuracy_of",
    "train",
    "zero_params",
]
