"""Sub-word units (characters or BPE) and token-level split labels."""

from __future__ import annotations

import heapq
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import BoundaryLabel

log = logging.getLogger(__name__)

__all__ = [
    "TokenSequence",
    "BpeModel",
    "LabelSequence",
    "char_tokenize",
    "bpe_train",
    "bpe_encode",
    "project_labels",
    "load_merges",
]


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    char_spans: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.char_spans):
            raise ValueError("one span per token required")
        pos = 0
        for tok, (start, end) in zip(self.tokens, self.char_spans):
            if start != pos or end - start != len(tok) or not tok:
                raise ValueError(f"spans do not tile the word at token {tok!r}")
            pos = end

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> TokenSequence:
        spans, pos = [], 0
        for tok in tokens:
            spans.append((pos, pos + len(tok)))
            pos += len(tok)
        return cls(tuple(tokens), tuple(spans))

    @property
    def word(self) -> str:
        return "".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def ends(self) -> list[int]:
        return [end for _, end in self.char_spans]


@dataclass(frozen=True)
class LabelSequence:
    labels: tuple[int, ...]
    lossy: bool = False


def char_tokenize(word: str) -> TokenSequence:
    if not word:
        raise ValueError("cannot tokenize an empty word")
    return TokenSequence.from_tokens(list(word))


@dataclass(frozen=True)
class BpeModel:
    merges: tuple[tuple[str, str], ...]
    vocab: frozenset[str]
    vocab_size_target: int

    def __post_init__(self):
        object.__setattr__(self, "_ranks", {pair: i for i, pair in enumerate(self.merges)})

    def encode(self, word: str) -> TokenSequence:
        return bpe_encode(self, word)

    __call__ = encode

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#version: dekompost-bpe vocab_size={self.vocab_size_target}\n")
            for left, right in self.merges:
                fh.write(f"{left} {right}\n")


def _pairs(symbols: Sequence[str]) -> Counter:
    return Counter(zip(symbols, symbols[1:]))


def _merge_word(symbols: tuple[str, ...], pair: tuple[str, str]) -> tuple[str, ...]:
    left, right = pair
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def bpe_train(corpus: Iterable[str], vocab_size: int) -> BpeModel:
    """Greedy BPE: merge the most frequent adjacent pair until the vocabulary
    reaches ``vocab_size`` or no pair occurs at least twice.

    Ties are broken by the lexicographically smallest ``(left, right)``.
    """
    word_freq = Counter(w for w in corpus if w)
    chars = sorted({c for w in word_freq for c in w})
    if vocab_size <= len(chars):
        raise ValueError(
            f"vocab_size {vocab_size} must exceed the {len(chars)} distinct characters of the corpus"
        )

    words = [tuple(w) for w in sorted(word_freq)]
    freqs = [word_freq["".join(w)] for w in words]
    pair_counts: Counter = Counter()
    where: dict[tuple[str, str], set[int]] = {}
    for idx, (sym, f) in enumerate(zip(words, freqs)):
        for pair, c in _pairs(sym).items():
            pair_counts[pair] += c * f
            where.setdefault(pair, set()).add(idx)

    # max-heap via negated count; stale entries are skipped on pop
    heap = [(-c, p) for p, c in pair_counts.items()]
    heapq.heapify(heap)

    vocab = set(chars)
    merges: list[tuple[str, str]] = []
    while len(vocab) < vocab_size and heap:
        neg, pair = heapq.heappop(heap)
        if pair_counts.get(pair, 0) != -neg:
            continue
        if -neg < 2:
            break
        merges.append(pair)
        vocab.add(pair[0] + pair[1])
        touched: set[tuple[str, str]] = set()
        for idx in sorted(where.pop(pair, ())):
            old = words[idx]
            new = _merge_word(old, pair)
            if new == old:
                continue
            f = freqs[idx]
            for p, c in _pairs(old).items():
                pair_counts[p] -= c * f
                touched.add(p)
            for p, c in _pairs(new).items():
                pair_counts[p] += c * f
                where.setdefault(p, set()).add(idx)
                touched.add(p)
            words[idx] = new
        for p in touched:
            c = pair_counts.get(p, 0)
            if c > 0:
                heapq.heappush(heap, (-c, p))
            else:
                pair_counts.pop(p, None)
    return BpeModel(tuple(merges), frozenset(vocab), vocab_size)


def bpe_encode(model: BpeModel, word: str) -> TokenSequence:
    """Apply merges in learned order; characters never seen stay single tokens."""
    if not word:
        raise ValueError("cannot tokenize an empty word")
    ranks = model._ranks  # type: ignore[attr-defined]
    symbols = list(word)
    while len(symbols) > 1:
        best, best_rank = None, None
        for pair in zip(symbols, symbols[1:]):
            r = ranks.get(pair)
            if r is not None and (best_rank is None or r < best_rank):
                best, best_rank = pair, r
        if best is None:
            break
        symbols = list(_merge_word(tuple(symbols), best))
    return TokenSequence.from_tokens(symbols)


def load_merges(path: str | Path, vocab_size: int | None = None) -> BpeModel:
    """Read a ``left right`` merge file; lines starting with '#' are skipped."""
    merges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                if vocab_size is None and "vocab_size=" in line:
                    vocab_size = int(line.rsplit("vocab_size=", 1)[1].split()[0])
                continue
            parts = line.split(" ")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"{path}: line {lineno}: expected 'left right'")
            merges.append((parts[0], parts[1]))
    vocab = {a + b for a, b in merges}
    for a, b in merges:
        vocab.update(t for t in (a, b) if len(t) == 1)
    if vocab_size is None:
        vocab_size = len(vocab)
    return BpeModel(tuple(merges), frozenset(vocab), vocab_size)


def project_labels(boundary: BoundaryLabel | int, tokens: TokenSequence) -> LabelSequence:
    """Put the single positive label on the token whose span ends at the boundary.

    A boundary inside a token is attributed to that token's end and flagged lossy.
    """
    split = boundary.split_index if isinstance(boundary, BoundaryLabel) else int(boundary)
    n_chars = tokens.char_spans[-1][1]
    if not 1 <= split <= n_chars - 1:
        raise ValueError(f"boundary {split} out of range for a {n_chars}-character word")
    if len(tokens) < 2:
        raise ValueError(f"single-token word {tokens.word!r} cannot carry a split label")
    labels = [0] * len(tokens)
    for i, (start, end) in enumerate(tokens.char_spans):
        if end == split:
            labels[i] = 1
            return LabelSequence(tuple(labels), lossy=False)
        if start < split < end:
            labels[i] = 1
            return LabelSequence(tuple(labels), lossy=True)
    raise AssertionError("spans do not cover the word")  # unreachable for valid spans
