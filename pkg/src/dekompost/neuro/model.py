"""Bidirectional recurrent split labeler: parameters, forward pass, loss and gradients."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .. import kernels
from ..kernels.rnn import GRU, LSTM, N_GATES, VANILLA

CELL_KINDS = {"vanilla": VANILLA, "gru": GRU, "lstm": LSTM}
PAD, UNK = "<pad>", "<unk>"
PAD_ID, UNK_ID = 0, 1

BLOCK_ORDER = ("embed", "fwd.W", "fwd.U", "fwd.b", "bwd.W", "bwd.U", "bwd.b", "out.W", "out.b")


@dataclass
class LabelerConfig:
    vocab: dict[str, int]
    cell_kind: str = "gru"
    hidden_dim: int = 256
    embed_dim: int = 64
    embeddings_trainable: bool = True
    epochs: int = 30
    learning_rate: float = 1e-3
    batch_size: int = 64
    seed: int = 13
    clip_norm: float | None = None
    tokenizer: str = "char"
    bpe_merges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.cell_kind not in CELL_KINDS:
            raise ValueError(f"cell_kind must be one of {sorted(CELL_KINDS)}, got {self.cell_kind!r}")
        if self.hidden_dim < 1 or self.embed_dim < 1:
            raise ValueError("hidden_dim and embed_dim must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.epochs < 0:
            raise ValueError("batch_size must be positive and epochs non-negative")
        if self.tokenizer not in ("char", "bpe"):
            raise ValueError(f"unknown tokenizer {self.tokenizer!r}")
        if self.vocab.get(PAD) != PAD_ID or self.vocab.get(UNK) != UNK_ID:
            raise ValueError("vocab must map <pad> to 0 and <unk> to 1")
        if sorted(self.vocab.values()) != list(range(len(self.vocab))):
            raise ValueError("vocab indices must be 0..n-1")

    @property
    def kind_code(self) -> int:
        return CELL_KINDS[self.cell_kind]

    @property
    def n_gates(self) -> int:
        return N_GATES[self.kind_code]

    def ids(self, tokens: Sequence[str]) -> list[int]:
        return [self.vocab.get(tok, UNK_ID) for tok in tokens]

    def tokenize(self, word: str):
        from ..tokenization import BpeModel, char_tokenize, bpe_encode

        if self.tokenizer == "char":
            return char_tokenize(word)
        model = getattr(self, "_bpe", None)
        if model is None:
            vocab = frozenset(a + b for a, b in self.bpe_merges)
            model = BpeModel(self.bpe_merges, vocab, max(len(vocab), 1))
            self._bpe = model
        return bpe_encode(model, word)


def build_vocab(token_lists: Iterable[Sequence[str]]) -> dict[str, int]:
    """<pad>=0, <unk>=1, then every observed token in sorted order."""
    seen = sorted({tok for toks in token_lists for tok in toks} - {PAD, UNK})
    vocab = {PAD: PAD_ID, UNK: UNK_ID}
    for tok in seen:
        vocab[tok] = len(vocab)
    return vocab


class LabelerParams(Mapping[str, np.ndarray]):
    """Named float64 parameter blocks in a fixed order."""

    def __init__(self, blocks: Mapping[str, np.ndarray]):
        missing = [k for k in BLOCK_ORDER if k not in blocks]
        if missing:
            raise ValueError(f"missing parameter blocks: {missing}")
        self.blocks = {k: np.ascontiguousarray(blocks[k], dtype=np.float64) for k in BLOCK_ORDER}

    def __getitem__(self, name: str) -> np.ndarray:
        return self.blocks[name]

    def __iter__(self) -> Iterator[str]:
        return iter(BLOCK_ORDER)

    def __len__(self) -> int:
        return len(BLOCK_ORDER)

    def copy(self) -> LabelerParams:
        return LabelerParams({k: v.copy() for k, v in self.blocks.items()})

    def check_finite(self) -> None:
        for name in BLOCK_ORDER:
            if not np.all(np.isfinite(self.blocks[name])):
                raise FloatingPointError(f"non-finite values in parameter block {name!r}")

    def n_params(self) -> int:
        return sum(v.size for v in self.blocks.values())


def init_params(config: LabelerConfig, seed: int | None = None, embeddings: np.ndarray | None = None) -> LabelerParams:
    """Uniform(-k, k) weights with k = 1/sqrt(fan_in); zero biases; embeddings U(-0.1, 0.1)."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    V, E, H, G = len(config.vocab), config.embed_dim, config.hidden_dim, config.n_gates

    def unif(k, shape):
        return rng.uniform(-k, k, size=shape)

    blocks = {"embed": unif(0.1, (V, E))}
    for d in ("fwd", "bwd"):
        blocks[f"{d}.W"] = unif(1 / np.sqrt(E), (G * H, E))
        blocks[f"{d}.U"] = unif(1 / np.sqrt(H), (G * H, H))
        blocks[f"{d}.b"] = np.zeros(G * H)
    blocks["out.W"] = unif(1 / np.sqrt(2 * H), (2, 2 * H))
    blocks["out.b"] = np.zeros(2)
    if embeddings is not None:
        if embeddings.shape != (V, E):
            raise ValueError(f"embedding matrix shape {embeddings.shape} != {(V, E)}")
        blocks["embed"] = np.array(embeddings, dtype=np.float64)
    return LabelerParams(blocks)


def zero_params(config: LabelerConfig) -> LabelerParams:
    p = init_params(config)
    return LabelerParams({k: np.zeros_like(v) for k, v in p.items()})


# -- batches -----------------------------------------------------------------

@dataclass
class Batch:
    ids: np.ndarray  # (B, T) int64, PAD_ID beyond each length
    lengths: np.ndarray  # (B,)
    labels: np.ndarray  # (B, T) int64
    mask: np.ndarray  # (B, T) float64, 1 on real positions

    @property
    def shape(self) -> tuple[int, int]:
        return self.ids.shape


def make_batch(sequences: Sequence[Sequence[int]], labels: Sequence[Sequence[int]] | None = None, pad_to: int | None = None) -> Batch:
    lengths = np.array([len(s) for s in sequences], dtype=np.int64)
    if len(sequences) == 0 or lengths.min() < 1:
        raise ValueError("batch needs at least one non-empty sequence")
    T = int(lengths.max()) if pad_to is None else pad_to
    if T < lengths.max():
        raise ValueError("pad_to shorter than the longest sequence")
    B = len(sequences)
    ids = np.full((B, T), PAD_ID, dtype=np.int64)
    lab = np.zeros((B, T), dtype=np.int64)
    mask = np.zeros((B, T))
    for b, seq in enumerate(sequences):
        ids[b, : len(seq)] = seq
        mask[b, : len(seq)] = 1.0
        if labels is not None:
            if len(labels[b]) != len(seq):
                raise ValueError("labels and tokens differ in length")
            lab[b, : len(seq)] = labels[b]
    return Batch(ids, lengths, lab, mask)


def _reverse_index(lengths: np.ndarray, T: int) -> np.ndarray:
    """(B, T) positions reversing each sequence within its length; padding stays put."""
    t = np.arange(T)[None, :]
    L = lengths[:, None]
    return np.where(t < L, L - 1 - t, t)


# -- forward / backward ------------------------------------------------------

@dataclass
class _Cache:
    ids_t: np.ndarray
    rev_ids_t: np.ndarray
    ridx: np.ndarray
    xf: np.ndarray
    xb: np.ndarray
    fwd: tuple
    bwd: tuple
    feats: np.ndarray
    probs: np.ndarray = field(default=None)


def _check_ids(config: LabelerConfig, ids: np.ndarray) -> None:
    if ids.size and (ids.min() < 0 or ids.max() >= len(config.vocab)):
        raise ValueError(f"token id out of range [0, {len(config.vocab)})")


def _forward(params: LabelerParams, config: LabelerConfig, batch: Batch) -> _Cache:
    _check_ids(config, batch.ids)
    kern = kernels.active
    B, T = batch.ids.shape
    ridx = _reverse_index(batch.lengths, T)
    rev_ids = np.take_along_axis(batch.ids, ridx, axis=1)
    ids_t = np.ascontiguousarray(batch.ids.T)
    rev_ids_t = np.ascontiguousarray(rev_ids.T)
    emb = params["embed"]
    xf = emb[ids_t]
    xb = emb[rev_ids_t]
    k = config.kind_code
    fwd = kern.rnn_forward(k, xf, params["fwd.W"], params["fwd.U"], params["fwd.b"])
    bwd = kern.rnn_forward(k, xb, params["bwd.W"], params["bwd.U"], params["bwd.b"])
    hb = bwd[0][1:][ridx.T, np.arange(B)[None, :]]
    feats = np.concatenate([fwd[0][1:], hb], axis=2)  # (T, B, 2H)
    W_out, b_out = params["out.W"], params["out.b"]
    logits = np.empty((T, B, 2))
    for t in range(T):
        logits[t] = feats[t] @ W_out.T + b_out
    z = logits - logits.max(axis=2, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=2, keepdims=True)
    return _Cache(ids_t, rev_ids_t, ridx, xf, xb, fwd, bwd, feats, probs)


def encode_sequence(params: LabelerParams, config: LabelerConfig, token_ids: Sequence[int]) -> np.ndarray:
    """Per-position features ``[h_fwd(t); h_bwd(t)]``, shape (length, 2*hidden)."""
    cache = _forward(params, config, make_batch([list(token_ids)]))
    return cache.feats[:, 0, :]


def predict_split_probs(params: LabelerParams, config: LabelerConfig, token_ids: Sequence[int]) -> np.ndarray:
    """Probability of a split after each token."""
    cache = _forward(params, config, make_batch([list(token_ids)]))
    return cache.probs[:, 0, 1].copy()


def predict_batch_probs(params: LabelerParams, config: LabelerConfig, sequences: Sequence[Sequence[int]], batch_size: int = 256) -> list[np.ndarray]:
    order = sorted(range(len(sequences)), key=lambda i: len(sequences[i]))
    out: list[np.ndarray | None] = [None] * len(sequences)
    for start in range(0, len(order), batch_size):
        chunk = order[start : start + batch_size]
        batch = make_batch([sequences[i] for i in chunk])
        probs = _forward(params, config, batch).probs[:, :, 1]
        for b, i in enumerate(chunk):
            out[i] = probs[: batch.lengths[b], b].copy()
    return out  # type: ignore[return-value]


def _masked_nll(cache: _Cache, batch: Batch) -> tuple[float, int]:
    probs_bt = np.transpose(cache.probs, (1, 0, 2))
    gold = np.take_along_axis(probs_bt, batch.labels[:, :, None], axis=2)[:, :, 0]
    sel = batch.mask.astype(bool)
    n = int(sel.sum())
    # boolean selection keeps the same element order whatever the padding
    with np.errstate(divide="ignore"):
        total = float(-np.sum(np.log(gold[sel])))
    return total, n


def batch_loss(params: LabelerParams, config: LabelerConfig, batch: Batch) -> float:
    cache = _forward(params, config, batch)
    total, n = _masked_nll(cache, batch)
    return total / n


def _raise_non_finite(params: LabelerParams, cache: _Cache) -> None:
    params.check_finite()
    for name, arr in (("fwd hidden states", cache.fwd[0]), ("bwd hidden states", cache.bwd[0]),
                      ("output probabilities", cache.probs)):
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError(f"non-finite values in {name}")
    raise FloatingPointError("non-finite loss")


def loss_and_gradients(params: LabelerParams, config: LabelerConfig, batch: Batch) -> tuple[float, dict[str, np.ndarray]]:
    """Mean per-position softmax cross-entropy over unmasked positions, with gradients."""
    cache = _forward(params, config, batch)
    total, n = _masked_nll(cache, batch)
    loss = total / n
    if not np.isfinite(loss):
        _raise_non_finite(params, cache)

    kern = kernels.active
    T, B, _ = cache.feats.shape
    H = config.hidden_dim
    onehot = np.zeros((T, B, 2))
    np.put_along_axis(onehot, batch.labels.T[:, :, None], 1.0, axis=2)
    dlogits = (cache.probs - onehot) * (batch.mask.T[:, :, None] / n)

    W_out = params["out.W"]
    dW_out = np.zeros_like(W_out)
    db_out = np.zeros(2)
    dfeats = np.empty_like(cache.feats)
    for t in range(T - 1, -1, -1):
        dW_out += dlogits[t].T @ cache.feats[t]
        db_out += dlogits[t].sum(axis=0)
        dfeats[t] = dlogits[t] @ W_out

    dHf = np.ascontiguousarray(dfeats[:, :, :H])
    # the reversal index is an involution, so gathering also scatters
    dHb = np.ascontiguousarray(dfeats[:, :, H:][cache.ridx.T, np.arange(B)[None, :]])

    k = config.kind_code
    grads: dict[str, np.ndarray] = {}
    dxf, grads["fwd.W"], grads["fwd.U"], grads["fwd.b"] = kern.rnn_backward(
        k, cache.xf, params["fwd.W"], params["fwd.U"], *cache.fwd, dHf)
    dxb, grads["bwd.W"], grads["bwd.U"], grads["bwd.b"] = kern.rnn_backward(
        k, cache.xb, params["bwd.W"], params["bwd.U"], *cache.bwd, dHb)
    grads["out.W"] = dW_out
    grads["out.b"] = db_out

    d_embed = np.zeros_like(params["embed"])
    if config.embeddings_trainable:
        for t in range(T - 1, -1, -1):
            np.add.at(d_embed, cache.ids_t[t], dxf[t])
            np.add.at(d_embed, cache.rev_ids_t[t], dxb[t])
    grads["embed"] = d_embed
    return loss, {name: grads[name] for name in BLOCK_ORDER}
