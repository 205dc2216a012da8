"""Dataset preparation and the epoch loop for the split labeler."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..corpus import CompoundEntry, UnalignableError, derive_boundary
from ..tokenization import TokenSequence, project_labels
from .model import UNK_ID, LabelerConfig, LabelerParams, init_params, loss_and_gradients, make_batch, predict_batch_probs
from .optim import AdamState, adam_step

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledExample:
    surface: str
    token_ids: tuple[int, ...]
    labels: tuple[int, ...]
    ends: tuple[int, ...]  # character offset where each token ends
    split_index: int
    lossy: bool = False


@dataclass
class PrepStats:
    kept: int = 0
    unalignable: int = 0
    single_token: int = 0
    lossy: int = 0

    @property
    def lossy_rate(self) -> float:
        return self.lossy / self.kept if self.kept else 0.0


def prepare_examples(entries: Sequence[CompoundEntry], tokenize: Callable[[str], TokenSequence], vocab: dict[str, int]) -> tuple[list[LabeledExample], PrepStats]:
    """Tokenize, label and index entries; unalignable and single-token words are dropped and counted."""
    stats = PrepStats()
    out = []
    for entry in entries:
        try:
            boundary = derive_boundary(entry)
        except UnalignableError:
            stats.unalignable += 1
            continue
        toks = tokenize(entry.surface)
        if len(toks) < 2:
            stats.single_token += 1
            continue
        lab = project_labels(boundary, toks)
        stats.kept += 1
        stats.lossy += lab.lossy
        out.append(LabeledExample(
            surface=entry.surface,
            token_ids=tuple(vocab.get(t, UNK_ID) for t in toks.tokens),
            labels=lab.labels,
            ends=tuple(toks.ends()),
            split_index=boundary.split_index,
            lossy=lab.lossy,
        ))
    if stats.single_token:
        log.warning("dropped %d single-token words that cannot carry a split label", stats.single_token)
    if stats.unalignable:
        log.warning("dropped %d unalignable entries", stats.unalignable)
    return out, stats


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    dev_accuracy: float | None


@dataclass
class TrainResult:
    params: LabelerParams
    log: list[EpochRecord]
    best_params: LabelerParams
    best_epoch: int
    state: AdamState | None = field(default=None, repr=False)


def split_accuracy_of(params: LabelerParams, config: LabelerConfig, examples: Sequence[LabeledExample]) -> float:
    from ..splitters import argmax_boundary

    if not examples:
        return float("nan")
    probs = predict_batch_probs(params, config, [ex.token_ids for ex in examples])
    hits = sum(argmax_boundary(p, ex.ends) == ex.split_index for p, ex in zip(probs, examples))
    return hits / len(examples)


def _batches(examples: Sequence[LabeledExample], batch_size: int, rng: np.random.Generator) -> list[list[int]]:
    perm = rng.permutation(len(examples))
    lengths = np.array([len(examples[i].token_ids) for i in perm])
    order = perm[np.argsort(lengths, kind="stable")]
    chunks = [order[i : i + batch_size].tolist() for i in range(0, len(order), batch_size)]
    return [chunks[j] for j in rng.permutation(len(chunks))]


def _clip(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if norm <= max_norm or norm == 0.0:
        return grads
    scale = max_norm / norm
    return {k: g * scale for k, g in grads.items()}


def train(config: LabelerConfig, train_set: Sequence[LabeledExample], dev_set: Sequence[LabeledExample] | None = None, *,
          params: LabelerParams | None = None, stop_at_dev_accuracy: float | None = None,
          on_epoch: Callable[[EpochRecord], None] | None = None) -> TrainResult:
    """Adam over shuffled, length-bucketed batches for ``config.epochs`` epochs.

    Returns the final-epoch parameters plus the best-dev snapshot (earliest
    epoch on ties; the final parameters when no dev set is given).
    """
    if not train_set:
        raise ValueError("empty training set")
    init_seq, shuffle_seq = np.random.SeedSequence(config.seed).spawn(2)
    if params is None:
        params = init_params(config, seed=int(init_seq.generate_state(1)[0]))
    params = params.copy()
    rng = np.random.default_rng(shuffle_seq)
    state = AdamState.fresh(params)

    history: list[EpochRecord] = []
    best_params, best_epoch, best_acc = params.copy(), 0, -1.0
    for epoch in range(1, config.epochs + 1):
        total, positions = 0.0, 0
        for idx in _batches(train_set, config.batch_size, rng):
            batch = make_batch([train_set[i].token_ids for i in idx], [train_set[i].labels for i in idx])
            loss, grads = loss_and_gradients(params, config, batch)
            if config.clip_norm:
                grads = _clip(grads, config.clip_norm)
            new, state = adam_step(params, grads, state, config.learning_rate)
            params = LabelerParams(new)
            n = int(batch.mask.sum())
            total += loss * n
            positions += n
        params.check_finite()
        dev_acc = split_accuracy_of(params, config, dev_set) if dev_set else None
        rec = EpochRecord(epoch, total / positions, dev_acc)
        history.append(rec)
        log.info("epoch %d loss=%.6f dev_accuracy=%s", epoch, rec.train_loss, dev_acc)
        if on_epoch is not None:
            on_epoch(rec)
        if dev_acc is not None and dev_acc > best_acc:
            best_acc, best_epoch, best_params = dev_acc, epoch, params.copy()
        if stop_at_dev_accuracy is not None and dev_acc is not None and dev_acc >= stop_at_dev_accuracy:
            break
    if not dev_set:
        best_params, best_epoch = params.copy(), len(history)
    return TrainResult(params, history, best_params, best_epoch, state)
