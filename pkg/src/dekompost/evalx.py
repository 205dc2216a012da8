"""Split accuracy, binary precision/recall/F1 and error analysis."""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import AnnotatedCompound, BoundaryLabel, CompoundEntry
from .splitters import DEFAULT_TRANSFORMS, SplitResult, TransformTable

# published reference scores, printed alongside local results
REFERENCE_SPLIT_ACCURACY = {"CharSplit": 0.879, "SECOS": 0.914, "Char-GRU": 0.956}
REFERENCE_IDIOM_F1 = {
    "Dummy model": 0.21,
    "Gold Split+word2vec+GBDT": 0.567,
    "Gold Split+word2vec+LogReg": 0.579,
    "Gold Split+fastText+GBDT": 0.584,
    "Gold Split+fastText+LogReg": 0.577,
    "Char-GRU Split+word2vec+GBDT": 0.545,
    "Char-GRU Split+word2vec+LogReg": 0.521,
    "Char-GRU Split+fastText+GBDT": 0.554,
    "Char-GRU Split+fastText+LogReg": 0.541,
}


@dataclass(frozen=True)
class SplitMetrics:
    n: int
    correct: int
    unalignable_dropped: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.n if self.n else 0.0

    def result_line(self) -> str:
        return f"RESULT accuracy={self.accuracy:.6f} n={self.n} dropped={self.unalignable_dropped}"


def split_accuracy(preds: Sequence[SplitResult], gold: Sequence[BoundaryLabel | None]) -> SplitMetrics:
    """Exact boundary match per compound; a ``None`` gold label marks an unalignable item, which is skipped."""
    if len(preds) != len(gold):
        raise ValueError(f"{len(preds)} predictions for {len(gold)} gold labels")
    n = correct = dropped = 0
    for p, g in zip(preds, gold):
        if g is None:
            dropped += 1
            continue
        n += 1
        correct += p.boundary is not None and p.boundary == g.split_index
    return SplitMetrics(n, correct, dropped)


@dataclass(frozen=True)
class ClassMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    positive_class: int = 1

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def precision_undefined(self) -> bool:
        return self.tp + self.fp == 0

    @property
    def recall_undefined(self) -> bool:
        return self.tp + self.fn == 0

    @property
    def precision(self) -> float:
        return 0.0 if self.precision_undefined else self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        return 0.0 if self.recall_undefined else self.tp / (self.tp + self.fn)

    @property
    def f1_undefined(self) -> bool:
        return self.precision + self.recall == 0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n if self.n else 0.0

    def result_line(self) -> str:
        return (f"RESULT f1={self.f1:.6f} precision={self.precision:.6f} recall={self.recall:.6f} "
                f"tp={self.tp} fp={self.fp} fn={self.fn} tn={self.tn} n={self.n}")


def binary_prf1(preds: Sequence[int], gold: Sequence[int], positive_class: int = 1) -> ClassMetrics:
    if len(preds) != len(gold):
        raise ValueError(f"{len(preds)} predictions for {len(gold)} gold labels")
    tp = fp = fn = tn = 0
    for p, g in zip(preds, gold):
        pp, gp = int(p) == positive_class, int(g) == positive_class
        if pp and gp:
            tp += 1
        elif pp:
            fp += 1
        elif gp:
            fn += 1
        else:
            tn += 1
    return ClassMetrics(tp, fp, fn, tn, positive_class)


# -- error analysis ----------------------------------------------------------

@dataclass(frozen=True)
class SplitError:
    surface: str
    gold: int
    predicted: int | None
    category: int | None = None

    @property
    def delta(self) -> int | None:
        return None if self.predicted is None else self.predicted - self.gold

    def skipped(self) -> str:
        """Characters between the gold and the predicted boundary."""
        if self.predicted is None:
            return ""
        a, b = sorted((self.gold, self.predicted))
        return self.surface[a:b]


@dataclass
class ErrorReport:
    errors: list[SplitError] = field(default_factory=list)
    linking_confusions: list[SplitError] = field(default_factory=list)
    top_modifiers: list[tuple[str, int]] = field(default_factory=list)
    top_heads: list[tuple[str, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.errors)

    def tsv(self) -> str:
        out = io.StringIO()
        for e in self.errors:
            gold = f"{e.surface[:e.gold]}|{e.surface[e.gold:]}"
            pred = e.surface if e.predicted is None else f"{e.surface[:e.predicted]}|{e.surface[e.predicted:]}"
            cat = "" if e.category is None else str(e.category)
            out.write(f"{e.surface}\t{gold}\t{pred}\t{cat}\n")
        return out.getvalue()

    def summary(self) -> str:
        lines = [f"{len(self.errors)} errors"]
        if self.errors:
            lines.append(f"{len(self.linking_confusions)} linking-element confusions")
        for title, table in (("modifiers", self.top_modifiers), ("heads", self.top_heads)):
            if table:
                lines.append(f"most frequent {title} among misclassified compounds:")
                lines.extend(f"  {word}\t{count}" for word, count in table)
        return "\n".join(lines) + "\n"

    def write(self, tsv_path: str | Path, summary_path: str | Path | None = None) -> None:
        Path(tsv_path).write_text(self.tsv(), encoding="utf-8")
        if summary_path is not None:
            Path(summary_path).write_text(self.summary(), encoding="utf-8")


def is_linking_confusion(err: SplitError, suffixes: Sequence[str], window: int = 2) -> bool:
    d = err.delta
    if d is None or d == 0 or abs(d) > window:
        return False
    return err.skipped().lower() in {s.lower() for s in suffixes}


def error_report(preds: Sequence[SplitResult], gold_entries: Sequence[CompoundEntry | AnnotatedCompound],
                 gold: Sequence[BoundaryLabel | None], transforms: TransformTable = DEFAULT_TRANSFORMS,
                 window: int = 2) -> ErrorReport:
    """One record per wrong split; unalignable gold items are skipped."""
    if not len(preds) == len(gold_entries) == len(gold):
        raise ValueError("predictions, entries and gold labels are not aligned")
    report = ErrorReport()
    suffixes = transforms.linking_suffixes
    for p, entry, g in zip(preds, gold_entries, gold):
        if g is None or p.boundary == g.split_index:
            continue
        category = entry.category if isinstance(entry, AnnotatedCompound) else None
        err = SplitError(entry.surface, g.split_index, p.boundary, category)
        report.errors.append(err)
        if is_linking_confusion(err, suffixes, window):
            report.linking_confusions.append(err)
    return report


def idiom_error_report(compounds: Sequence[AnnotatedCompound], preds: Sequence[int], k: int = 10) -> ErrorReport:
    """Top-k modifiers and heads among misclassified idiomaticity examples (binary labels)."""
    from .idiom import binarize_category

    if len(compounds) != len(preds):
        raise ValueError("predictions and compounds are not aligned")
    wrong = [c for c, p in zip(compounds, preds) if binarize_category(c.category) != int(p)]
    mods = Counter(c.entry.modifier.split("|")[0] for c in wrong)
    heads = Counter(c.entry.head for c in wrong)
    order = lambda item: (-item[1], item[0])  # noqa: E731
    return ErrorReport(top_modifiers=sorted(mods.items(), key=order)[:k], top_heads=sorted(heads.items(), key=order)[:k])


def reference_footer() -> str:
    parts = " ".join(f"{name}={acc}" for name, acc in REFERENCE_SPLIT_ACCURACY.items())
    return f"reference accuracy: {parts}"
