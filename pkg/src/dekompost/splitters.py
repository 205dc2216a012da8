"""Three compound splitters behind one interface.

* frequency: geometric mean of part frequencies with linking-element and
  umlaut transforms on the left part
* ngram: positional character n-gram statistics (CharSplit-style)
* neural: argmax decoding of a trained split labeler
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus import Lexicon, deumlaut
from .neuro.model import LabelerConfig, LabelerParams, predict_batch_probs

MIN_PART_LEN = 3
NGRAM_ORDERS = (2, 3, 4)

METHODS = ("frequency", "ngram", "neural", "none")


@dataclass(frozen=True)
class SplitResult:
    left: str
    right: str
    score: float
    method: str
    lemma: str | None = None  # left lemma matched by the frequency splitter

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "none" and self.right:
            raise ValueError("an unsplit result has an empty right part")

    @property
    def boundary(self) -> int | None:
        return None if self.method == "none" else len(self.left)

    @property
    def surface(self) -> str:
        return self.left + self.right

    def __str__(self) -> str:
        return self.left if self.method == "none" else f"{self.left}|{self.right}"

    @classmethod
    def unsplit(cls, word: str, score: float = 0.0) -> SplitResult:
        return cls(word, "", score, "none")


class Splitter(Protocol):
    method: str

    def split(self, word: str) -> SplitResult: ...


def _lower(word: str) -> str:
    # keep offsets aligned for the rare characters whose lowercase is longer
    low = word.lower()
    if len(low) == len(word):
        return low
    return "".join(c.lower() if len(c.lower()) == 1 else c for c in word)


# -- frequency splitter ------------------------------------------------------

@dataclass(frozen=True)
class Transform:
    """Maps a lowercased left surface part to a lemma candidate."""

    kind: str  # strip | add | deumlaut
    suffix: str = ""

    def __post_init__(self):
        if self.kind not in ("strip", "add", "deumlaut"):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind in ("strip", "add") and not self.suffix:
            raise ValueError(f"{self.kind} transform needs a suffix")

    @property
    def name(self) -> str:
        return self.kind if self.kind == "deumlaut" else f"{self.kind}:{self.suffix}"

    def apply(self, part: str) -> str | None:
        if self.kind == "strip":
            if part.endswith(self.suffix) and len(part) > len(self.suffix):
                return part[: -len(self.suffix)]
            return None
        if self.kind == "add":
            return part + self.suffix
        plain = deumlaut(part)
        return plain if plain != part else None


@dataclass(frozen=True)
class TransformTable:
    transforms: tuple[Transform, ...]

    def __iter__(self):
        return iter(self.transforms)

    def __len__(self) -> int:
        return len(self.transforms)

    @property
    def linking_suffixes(self) -> tuple[str, ...]:
        return tuple(t.suffix for t in self.transforms if t.kind == "strip")

    @classmethod
    def default(cls) -> TransformTable:
        strips = ("s", "es", "n", "en", "nen", "e", "er")
        return cls(tuple(Transform("strip", s) for s in strips) + (Transform("add", "e"), Transform("deumlaut")))

    @classmethod
    def load(cls, path: str | Path) -> TransformTable:
        """Lines ``strip:<suffix>``, ``add:<suffix>`` or ``deumlaut``; '#' starts a comment."""
        items = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                kind, _, suffix = line.partition(":")
                try:
                    items.append(Transform(kind.strip(), suffix.strip()))
                except ValueError as exc:
                    raise ValueError(f"{path}: line {lineno}: {exc}") from None
        return cls(tuple(items))


DEFAULT_TRANSFORMS = TransformTable.default()


@dataclass(frozen=True)
class SplitCandidate:
    boundary: int
    left_lemma: str
    right: str
    left_freq: int
    right_freq: int
    transform: str = "identity"

    @property
    def score(self) -> float:
        return math.sqrt(self.left_freq * self.right_freq)


def enumerate_candidates(word: str, lexicon: Lexicon, transforms: TransformTable = DEFAULT_TRANSFORMS,
                         min_part_len: int = MIN_PART_LEN) -> list[SplitCandidate]:
    """Every (boundary, transform) whose right part and left lemma are both in the lexicon.

    Ordered by boundary, identity before the table's transforms.
    """
    w = _lower(word)
    out = []
    for i in range(min_part_len, len(w) - min_part_len + 1):
        left, right = w[:i], w[i:]
        rf = lexicon.freq(right)
        if not rf:
            continue
        options = [("identity", left)] + [(t.name, t.apply(left)) for t in transforms]
        for name, lemma in options:
            if lemma is None or len(lemma) < min_part_len:
                continue
            lf = lexicon.freq(lemma)
            if lf:
                out.append(SplitCandidate(i, lemma, right, lf, rf, name))
    return out


def frequency_split(word: str, lexicon: Lexicon, transforms: TransformTable = DEFAULT_TRANSFORMS,
                    min_part_len: int = MIN_PART_LEN) -> SplitResult:
    """Best candidate by sqrt(freq(left lemma) * freq(right)).

    Leaving the word whole scores freq(word) and wins ties.
    """
    keep = lexicon.freq(word)
    best: SplitCandidate | None = None
    for cand in enumerate_candidates(word, lexicon, transforms, min_part_len):
        if best is None or cand.score > best.score:
            best = cand
    if best is None or best.score <= keep:
        return SplitResult.unsplit(word, float(keep))
    i = best.boundary
    return SplitResult(word[:i], word[i:], best.score, "frequency", lemma=best.left_lemma)


@dataclass
class FrequencySplitter:
    lexicon: Lexicon
    transforms: TransformTable = DEFAULT_TRANSFORMS
    min_part_len: int = MIN_PART_LEN
    method: str = "frequency"

    def split(self, word: str) -> SplitResult:
        return frequency_split(word, self.lexicon, self.transforms, self.min_part_len)


# -- n-gram splitter ---------------------------------------------------------

@dataclass
class NgramStats:
    """Per n-gram counts of occurrences at word begin, middle and end."""

    counts: dict[str, list[int]] = field(default_factory=lambda: defaultdict(lambda: [0, 0, 0]))
    orders: tuple[int, ...] = NGRAM_ORDERS

    def begin(self, gram: str) -> int:
        return self._get(gram)[0]

    def middle(self, gram: str) -> int:
        return self._get(gram)[1]

    def end(self, gram: str) -> int:
        return self._get(gram)[2]

    def _get(self, gram: str) -> list[int]:
        return self.counts.get(gram, [0, 0, 0])

    def beginness(self, gram: str) -> float:
        b, m, e = self._get(gram)
        total = b + m + e
        return b / total if total else 0.0

    def endness(self, gram: str) -> float:
        b, m, e = self._get(gram)
        total = b + m + e
        return e / total if total else 0.0

    def __add__(self, other: NgramStats) -> NgramStats:
        if self.orders != other.orders:
            raise ValueError("n-gram orders differ")
        out = NgramStats(orders=self.orders)
        for src in (self, other):
            for gram, c in src.counts.items():
                acc = out.counts[gram]
                for k in range(3):
                    acc[k] += c[k]
        return out

    def scaled(self, factor: int) -> NgramStats:
        out = NgramStats(orders=self.orders)
        for gram, c in self.counts.items():
            out.counts[gram] = [x * factor for x in c]
        return out


def collect_ngram_stats(lexicon: Lexicon | dict[str, int], orders: Sequence[int] = NGRAM_ORDERS) -> NgramStats:
    """Frequency-weighted positional n-gram counts.

    The prefix n-gram counts as begin, the suffix n-gram as end (a word of
    exactly n characters contributes to both), everything else as middle.
    """
    stats = NgramStats(orders=tuple(orders))
    for word, freq in lexicon.items():
        w = _lower(word)
        for n in orders:
            last = len(w) - n
            for i in range(last + 1):
                acc = stats.counts[w[i : i + n]]
                if i == 0:
                    acc[0] += freq
                if i == last:
                    acc[2] += freq
                if 0 < i < last:
                    acc[1] += freq
    return stats


def ngram_components(word: str, i: int, stats: NgramStats) -> dict[int, float]:
    """½·(endness of the n-gram ending at i + beginness of the n-gram starting at i), per n."""
    w = _lower(word)
    if not 1 <= i <= len(w) - 1:
        raise ValueError(f"boundary {i} out of range for {word!r}")
    out = {}
    for n in stats.orders:
        end = stats.endness(w[i - n : i]) if i >= n else 0.0
        begin = stats.beginness(w[i : i + n]) if len(w) - i >= n else 0.0
        out[n] = 0.5 * (end + begin)
    return out


def ngram_position_score(word: str, i: int, stats: NgramStats) -> float:
    comps = ngram_components(word, i, stats)
    return sum(comps.values()) / len(comps)


def ngram_split(word: str, stats: NgramStats, min_part_len: int = MIN_PART_LEN) -> SplitResult:
    if len(word) < 2 * min_part_len:
        return SplitResult.unsplit(word)
    best_i, best = -1, -1.0
    for i in range(min_part_len, len(word) - min_part_len + 1):
        s = ngram_position_score(word, i, stats)
        if s > best:
            best_i, best = i, s
    return SplitResult(word[:best_i], word[best_i:], best, "ngram")


@dataclass
class NgramSplitter:
    stats: NgramStats
    min_part_len: int = MIN_PART_LEN
    method: str = "ngram"

    def split(self, word: str) -> SplitResult:
        return ngram_split(word, self.stats, self.min_part_len)


# -- neural splitter ---------------------------------------------------------

def argmax_boundary(probs: np.ndarray, ends: Sequence[int]) -> int | None:
    """Character offset after the most probable non-final token (first on ties)."""
    if len(ends) < 2:
        return None
    return int(ends[int(np.argmax(np.asarray(probs)[: len(ends) - 1]))])


def neural_split(params: LabelerParams, config: LabelerConfig, word: str, tokenize=None) -> SplitResult:
    return NeuralSplitter(params, config, tokenize).split(word)


@dataclass
class NeuralSplitter:
    params: LabelerParams
    config: LabelerConfig
    tokenize: object = None
    method: str = "neural"

    def _tok(self, word: str):
        return (self.tokenize or self.config.tokenize)(word)

    def split(self, word: str) -> SplitResult:
        return self.split_many([word])[0]

    def split_many(self, words: Iterable[str]) -> list[SplitResult]:
        words = list(words)
        toks = [self._tok(w) for w in words]
        multi = [k for k, t in enumerate(toks) if len(t) >= 2]
        probs = predict_batch_probs(self.params, self.config, [self.config.ids(toks[k].tokens) for k in multi])
        out = [SplitResult.unsplit(w) for w in words]
        for k, p in zip(multi, probs):
            ends = toks[k].ends()
            i = int(np.argmax(p[:-1]))
            b = ends[i]
            out[k] = SplitResult(words[k][:b], words[k][b:], float(p[i]), "neural")
        return out
