"""Labeler model files and pretrained sub-word embeddings."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .. import container
from ..container import Container, ModelFormatError
from ..embeddings import load_text_vectors
from .model import BLOCK_ORDER, LabelerConfig, LabelerParams

log = logging.getLogger(__name__)

_SCALARS = {
    "cell_kind": str,
    "hidden_dim": int,
    "embed_dim": int,
    "embeddings_trainable": lambda s: s == "true",
    "epochs": int,
    "learning_rate": float,
    "batch_size": int,
    "seed": int,
    "clip_norm": lambda s: None if s == "none" else float(s),
    "tokenizer": str,
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return repr(value) if isinstance(value, float) else str(value)


def to_container(params: LabelerParams, config: LabelerConfig) -> Container:
    vocab = sorted(config.vocab, key=config.vocab.__getitem__)
    return Container(
        kind="labeler",
        config={key: _fmt(getattr(config, key)) for key in _SCALARS},
        lists={"vocab": vocab, "merges": [list(m) for m in config.bpe_merges]},
        blocks={name: params[name] for name in BLOCK_ORDER},
    )


def save_params(params: LabelerParams, config: LabelerConfig, path: str | Path) -> None:
    """Write a DKMP labeler file; parameters are stored as float32."""
    container.write(to_container(params, config), path)


def load_params(path: str | Path) -> tuple[LabelerParams, LabelerConfig]:
    c = container.read(path)
    if c.kind != "labeler":
        raise ModelFormatError(f"{path} holds a {c.kind!r} model, not a labeler")
    try:
        kwargs = {key: conv(c.config[key]) for key, conv in _SCALARS.items()}
    except KeyError as exc:
        raise ModelFormatError(f"missing config key {exc.args[0]!r}") from None
    vocab = {tok: i for i, tok in enumerate(c.lists.get("vocab", []))}
    merges = tuple(tuple(m) for m in c.lists.get("merges", []))
    config = LabelerConfig(vocab=vocab, bpe_merges=merges, **kwargs)
    return LabelerParams(c.blocks), config


def load_subword_embeddings(path: str | Path, vocab: dict[str, int], embed_dim: int | None = None, seed: int = 13) -> np.ndarray:
    """Embedding matrix rows from a text vector file; missing tokens get seeded U(-0.1, 0.1)."""
    table = load_text_vectors(path)
    if embed_dim is not None and table.dim != embed_dim:
        raise ValueError(f"vector file has dim {table.dim} but the labeler expects {embed_dim}")
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-0.1, 0.1, size=(len(vocab), table.dim))
    found = 0
    for tok, idx in vocab.items():
        vec = table.lookup(tok) if tok in table else None
        if vec is not None:
            matrix[idx] = vec
            found += 1
    missing = len(vocab) - found
    if missing:
        log.warning("%d of %d sub-word tokens missing from %s; randomly initialized", missing, len(vocab), path)
    return matrix
