"""Word vectors in the ``count dim`` text format with pluggable OOV handling."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

log = logging.getLogger(__name__)

OOV_POLICIES = ("unk_token", "zero", "ngram_compose")
UNK_TOKEN = "[unk]"


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    words: tuple[str, ...]
    matrix: np.ndarray  # (len(words), dim) float32
    oov_policy: str = "zero"
    ngrams: EmbeddingTable | None = field(default=None, repr=False)
    min_n: int = 3
    max_n: int = 6

    def __post_init__(self):
        if self.oov_policy not in OOV_POLICIES:
            raise EmbeddingError(f"unknown OOV policy {self.oov_policy!r}")
        if self.matrix.shape != (len(self.words), self.dim):
            raise EmbeddingError("matrix shape does not match words and dim")
        if not np.all(np.isfinite(self.matrix)):
            raise EmbeddingError("non-finite vector component")
        if self.ngrams is not None and self.ngrams.dim != self.dim:
            raise EmbeddingError(f"n-gram vectors have dim {self.ngrams.dim}, word vectors {self.dim}")
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.words)})

    @classmethod
    def from_dict(cls, vectors: Mapping[str, Iterable[float]], dim: int | None = None, **kw) -> EmbeddingTable:
        words = tuple(vectors)
        rows = [np.asarray(list(vectors[w]), dtype=np.float32) for w in words]
        if dim is None:
            dim = len(rows[0]) if rows else 0
        matrix = np.stack(rows) if rows else np.zeros((0, dim), dtype=np.float32)
        return cls(dim, words, matrix, **kw)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self._index  # type: ignore[attr-defined]

    def lookup(self, word: str) -> np.ndarray | None:
        """Exact match first, then the lowercased form."""
        idx = self._index.get(word)  # type: ignore[attr-defined]
        if idx is None:
            idx = self._index.get(word.lower())  # type: ignore[attr-defined]
        return None if idx is None else self.matrix[idx]

    def with_policy(self, policy: str, ngrams: EmbeddingTable | None = None) -> EmbeddingTable:
        return replace(self, oov_policy=policy, ngrams=ngrams if ngrams is not None else self.ngrams)


def load_text_vectors(path: str | Path, oov_policy: str = "zero") -> EmbeddingTable:
    """Read a word2vec/fastText ``.vec`` style text file.

    Duplicate words keep the last vector; a header count that disagrees with
    the number of rows only triggers a warning.
    """
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"{path}: line 1: expected 'count dim' header")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingError(f"{path}: line 1: expected 'count dim' header") from None
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if not parts or parts == [""]:
                continue
            word, values = parts[0], parts[1:]
            if len(values) != dim:
                raise EmbeddingError(f"line {lineno}: expected {dim} values, got {len(values)}")
            if word in vectors:
                log.warning("%s: line %d: duplicate word %r, keeping the last vector", path, lineno, word)
            try:
                vectors[word] = np.array(values, dtype=np.float32)
            except ValueError:
                raise EmbeddingError(f"line {lineno}: non-numeric vector component") from None
    if len(vectors) != count:
        log.warning("%s: header announces %d vectors, found %d", path, count, len(vectors))
    words = tuple(vectors)
    matrix = np.stack([vectors[w] for w in words]) if words else np.zeros((0, dim), dtype=np.float32)
    return EmbeddingTable(dim, words, matrix, oov_policy)


def dump_text_vectors(table: EmbeddingTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for word, row in zip(table.words, table.matrix):
            # shortest float32 repr round-trips exactly
            fh.write(word + " " + " ".join(str(x) for x in row.astype(np.float32)) + "\n")


def char_ngrams(word: str, min_n: int = 3, max_n: int = 6) -> list[str]:
    """Distinct n-grams of ``<word>`` in order of first occurrence."""
    wrapped = f"<{word}>"
    seen: dict[str, None] = {}
    for n in range(min_n, max_n + 1):
        for i in range(len(wrapped) - n + 1):
            seen.setdefault(wrapped[i : i + n], None)
    return list(seen)


def embed_word(table: EmbeddingTable, word: str) -> np.ndarray:
    vec = table.lookup(word)
    if vec is not None:
        return vec.copy()
    policy = table.oov_policy
    if policy == "zero":
        return np.zeros(table.dim, dtype=np.float32)
    if policy == "unk_token":
        unk = table.lookup(UNK_TOKEN)
        if unk is None:
            raise EmbeddingError(f"OOV word {word!r} and no {UNK_TOKEN} vector in the table")
        return unk.copy()
    # ngram_compose: mean over the matched n-gram set
    grams = table.ngrams
    if grams is None:
        return np.zeros(table.dim, dtype=np.float32)
    rows = [grams._index[g] for g in char_ngrams(word, table.min_n, table.max_n) if g in grams._index]  # type: ignore[attr-defined]
    if not rows:
        return np.zeros(table.dim, dtype=np.float32)
    return grams.matrix[rows].astype(np.float64).mean(axis=0).astype(np.float32)
