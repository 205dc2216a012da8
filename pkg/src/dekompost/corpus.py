"""Compound data files, gold boundaries, frequency lexicons and dataset splits."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "CorpusError",
    "UnalignableError",
    "CompoundEntry",
    "AnnotatedCompound",
    "BoundaryLabel",
    "Lexicon",
    "DatasetSplit",
    "parse_split_file",
    "write_split_file",
    "parse_annotated_file",
    "write_annotated_file",
    "read_frequency_file",
    "derive_boundary",
    "align_entries",
    "build_lexicon",
    "partition",
    "dataset_stats",
    "deumlaut",
]

DEFAULT_RATIOS = (0.8, 0.1, 0.1)
DEFAULT_SEED = 13


class CorpusError(ValueError):
    """Malformed data line. ``lineno`` is 1-based, or None when not file-bound."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        if lineno is not None:
            message = f"{message}, line {lineno}"
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class UnalignableError(ValueError):
    def __init__(self, surface: str):
        self.surface = surface
        super().__init__(f"cannot align head with surface form {surface!r}")


def _check_field(value: str, name: str) -> None:
    if not value:
        raise CorpusError(f"empty {name} field")
    if "\t" in value or "\n" in value or "\r" in value:
        raise CorpusError(f"{name} contains tab or newline")


@dataclass(frozen=True)
class CompoundEntry:
    surface: str
    modifier: str
    head: str
    frequency: int | None = None

    def __post_init__(self):
        _check_field(self.surface, "surface")
        _check_field(self.modifier, "modifier")
        _check_field(self.head, "head")
        if len(self.surface) < 2:
            raise CorpusError(f"surface {self.surface!r} shorter than 2 characters")
        if self.frequency is not None and self.frequency < 0:
            raise CorpusError("negative frequency")


@dataclass(frozen=True)
class AnnotatedCompound:
    entry: CompoundEntry
    category: int

    def __post_init__(self):
        if self.category not in (0, 1, 2, 3):
            raise CorpusError("category out of range")

    @property
    def surface(self) -> str:
        return self.entry.surface


@dataclass(frozen=True)
class BoundaryLabel:
    """Character offset of the gold split; the left part is ``surface[:split_index]``.

    ``rule`` records which alignment step produced the offset
    (``suffix``, ``strip``, ``deumlaut`` or ``deumlaut+strip``).
    """

    split_index: int
    rule: str = "suffix"

    def check(self, word: str) -> None:
        if not 1 <= self.split_index <= len(word) - 1:
            raise ValueError(
                f"split index {self.split_index} out of range for {word!r} (length {len(word)})"
            )


class Lexicon(Mapping[str, int]):
    """Lowercased word form -> frequency. Zero counts are never stored."""

    def __init__(self, counts: Mapping[str, int] | None = None):
        self._counts: dict[str, int] = {}
        if counts:
            for word, count in counts.items():
                self.add(word, count)

    def add(self, word: str, count: int = 1) -> None:
        if count < 0:
            raise ValueError(f"negative count for {word!r}")
        if count == 0:
            return
        key = word.lower()
        self._counts[key] = self._counts.get(key, 0) + count

    def freq(self, word: str) -> int:
        return self._counts.get(word.lower(), 0)

    def __getitem__(self, word: str) -> int:
        return self._counts[word.lower()]

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and word.lower() in self._counts

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __repr__(self) -> str:
        return f"Lexicon({len(self)} forms)"

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for word in sorted(self._counts):
                fh.write(f"{word}\t{self._counts[word]}\n")


@dataclass
class DatasetSplit:
    train: list
    dev: list
    test: list
    seed: int = DEFAULT_SEED

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.dev), len(self.test)


# -- file parsing ------------------------------------------------------------

def _data_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8")  # UnicodeDecodeError propagates on bad input
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line


def _parse_int(value: str, name: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise CorpusError(f"{name} is not an integer: {value!r}") from None
    if number < 0:
        raise CorpusError(f"negative {name}")
    return number


def parse_split_file(path: str | Path) -> list[CompoundEntry]:
    """Read ``surface<TAB>modifier<TAB>head[<TAB>frequency]`` lines.

    A modifier written as ``lauf|Lauf`` yields one entry per reading.
    """
    entries: list[CompoundEntry] = []
    for lineno, line in _data_lines(path):
        cols = line.split("\t")
        try:
            if len(cols) not in (3, 4):
                raise CorpusError(f"expected 3 or 4 columns, got {len(cols)}")
            surface, modifiers, head = cols[:3]
            freq = _parse_int(cols[3], "frequency") if len(cols) == 4 else None
            readings = modifiers.split("|")
            for modifier in readings:
                entries.append(CompoundEntry(surface, modifier, head, freq))
        except CorpusError as exc:
            raise CorpusError(exc.args[0], lineno, str(path)) from None
    return entries


def write_split_file(entries: Iterable[CompoundEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            cols = [e.surface, e.modifier, e.head]
            if e.frequency is not None:
                cols.append(str(e.frequency))
            fh.write("\t".join(cols) + "\n")


def parse_annotated_file(path: str | Path) -> list[AnnotatedCompound]:
    """Read ``frequency<TAB>surface<TAB>modifier<TAB>head<TAB>category`` lines."""
    items: list[AnnotatedCompound] = []
    for lineno, line in _data_lines(path):
        cols = line.split("\t")
        try:
            if len(cols) != 5:
                raise CorpusError(f"expected 5 columns, got {len(cols)}")
            freq = _parse_int(cols[0], "frequency")
            try:
                category = int(cols[4])
            except ValueError:
                raise CorpusError(f"category is not an integer: {cols[4]!r}") from None
            if category not in (0, 1, 2, 3):
                raise CorpusError("category out of range")
            entry = CompoundEntry(cols[1], cols[2], cols[3], freq)
            items.append(AnnotatedCompound(entry, category))
        except CorpusError as exc:
            raise CorpusError(exc.args[0], lineno, str(path)) from None
    return items


def write_annotated_file(items: Iterable[AnnotatedCompound], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            e = item.entry
            fh.write(f"{e.frequency or 0}\t{e.surface}\t{e.modifier}\t{e.head}\t{item.category}\n")


def read_frequency_file(path: str | Path) -> dict[str, int]:
    counts: dict[str, int] = {}
    for lineno, line in _data_lines(path):
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0]:
            raise CorpusError("expected word<TAB>count", lineno, str(path))
        try:
            count = _parse_int(cols[1], "count")
        except CorpusError as exc:
            raise CorpusError(exc.args[0], lineno, str(path)) from None
        counts[cols[0]] = counts.get(cols[0], 0) + count
    return counts


# -- boundaries --------------------------------------------------------------

_UMLAUTS = str.maketrans({"ä": "a", "ö": "o", "ü": "u", "Ä": "A", "Ö": "O", "Ü": "U"})
_HEAD_ENDINGS = ("en", "e", "n", "s")


def deumlaut(text: str) -> str:
    # äu -> au falls out of the single-letter mapping
    return text.translate(_UMLAUTS)


def _suffix_split(surface: str, head: str) -> int | None:
    if head and surface.endswith(head):
        idx = len(surface) - len(head)
        if 1 <= idx <= len(surface) - 1:
            return idx
    return None


def _stripped_heads(head: str) -> Iterator[str]:
    for ending in _HEAD_ENDINGS:
        if head.endswith(ending) and len(head) > len(ending):
            yield head[: -len(ending)]


def derive_boundary(entry: CompoundEntry) -> BoundaryLabel:
    """Locate the gold boundary from the head; the left part keeps any linking element.

    Fallbacks when the head is not a plain suffix of the surface: strip one
    final e/en/n/s from the head, then compare umlaut-free forms. Raises
    :class:`UnalignableError` when nothing matches.
    """
    surface = entry.surface.lower()
    head = entry.head.lower()

    idx = _suffix_split(surface, head)
    if idx is not None:
        return BoundaryLabel(idx, "suffix")
    for short in _stripped_heads(head):
        idx = _suffix_split(surface, short)
        if idx is not None:
            return BoundaryLabel(idx, "strip")

    # translation is length-preserving, so offsets stay valid
    plain_surface, plain_head = deumlaut(surface), deumlaut(head)
    idx = _suffix_split(plain_surface, plain_head)
    if idx is not None:
        return BoundaryLabel(idx, "deumlaut")
    for short in _stripped_heads(plain_head):
        idx = _suffix_split(plain_surface, short)
        if idx is not None:
            return BoundaryLabel(idx, "deumlaut+strip")
    raise UnalignableError(entry.surface)


def align_entries(entries: Sequence[CompoundEntry]) -> tuple[list[tuple[CompoundEntry, BoundaryLabel]], list[CompoundEntry]]:
    """Split entries into (aligned pairs, unalignable entries)."""
    aligned, dropped = [], []
    for entry in entries:
        try:
            aligned.append((entry, derive_boundary(entry)))
        except UnalignableError:
            dropped.append(entry)
    return aligned, dropped


# -- lexicon and partitions --------------------------------------------------

def build_lexicon(entries: Iterable[CompoundEntry], extra: str | Path | Mapping[str, int] | None = None) -> Lexicon:
    lex = Lexicon()
    for e in entries:
        lex.add(e.modifier)
        lex.add(e.head)
    if extra is not None:
        counts = extra if isinstance(extra, Mapping) else read_frequency_file(extra)
        for word, count in counts.items():
            lex.add(word, count)
    return lex


def partition(entries: Sequence, ratios: Sequence[float] = DEFAULT_RATIOS, seed: int = DEFAULT_SEED) -> DatasetSplit:
    """Seeded shuffle followed by contiguous slicing.

    Dev and test sizes are floored; the remainder goes to train.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be three non-negative fractions summing to 1, got {tuple(ratios)}")
    n = len(entries)
    # guard against 0.29 * 100 == 28.999999999999996
    n_dev = math.floor(n * ratios[1] + 1e-9)
    n_test = math.floor(n * ratios[2] + 1e-9)
    n_train = n - n_dev - n_test
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [entries[i] for i in order]
    return DatasetSplit(
        train=shuffled[:n_train],
        dev=shuffled[n_train : n_train + n_dev],
        test=shuffled[n_train + n_dev :],
        seed=seed,
    )


@dataclass
class CorpusStats:
    entries: int
    compounds: int
    modifiers: int
    heads: int
    hapax_modifiers: int
    hapax_heads: int
    unalignable: int
    rules: dict[str, int] = field(default_factory=dict)


def dataset_stats(entries: Sequence[CompoundEntry]) -> CorpusStats:
    """Distinct-form counts for a compound list."""
    surfaces = {e.surface for e in entries}
    mods = Counter(e.modifier for e in entries)
    heads = Counter(e.head for e in entries)
    aligned, dropped = align_entries(entries)
    return CorpusStats(
        entries=len(entries),
        compounds=len(surfaces),
        modifiers=len(mods),
        heads=len(heads),
        hapax_modifiers=sum(1 for c in mods.values() if c == 1),
        hapax_heads=sum(1 for c in heads.values() if c == 1),
        unalignable=len(dropped),
        rules=dict(Counter(b.rule for _, b in aligned)),
    )
