"""Synthetic data shared by the test modules."""

from __future__ import annotations

import numpy as np

from dekompost.corpus import AnnotatedCompound, CompoundEntry, Lexicon

LETTERS = list("abdefgiklmnoprstu")


def pseudo_root(rng: np.random.Generator, lo: int = 3, hi: int = 6) -> str:
    return "".join(rng.choice(LETTERS, size=int(rng.integers(lo, hi + 1))))


def pseudo_compounds(n: int, seed: int = 5, n_roots: int = 40) -> list[CompoundEntry]:
    """Distinct two-root compounds built from a shared pool of 3-6 letter roots."""
    rng = np.random.default_rng(seed)
    roots = sorted({pseudo_root(rng) for _ in range(n_roots)})
    out, seen = [], set()
    while len(out) < n:
        a, b = rng.choice(roots, 2, replace=False)
        word = (a + b).capitalize()
        if word in seen:
            continue
        seen.add(word)
        out.append(CompoundEntry(word, str(a).capitalize(), str(b).capitalize()))
    return out


def random_lexicon_case(rng: np.random.Generator, max_words: int = 50, max_len: int = 15) -> tuple[str, Lexicon]:
    """A word of at most ``max_len`` characters and a lexicon of at most ``max_words`` forms that often split it."""
    alphabet = list("aeinrstäöu")
    pieces = ["".join(rng.choice(alphabet, size=int(rng.integers(1, 6)))) for _ in range(6)]
    links = ["", "", "s", "es", "n", "en", "e", "er", "nen"]
    left = str(rng.choice(pieces))
    right = str(rng.choice(pieces))
    word = (left + str(rng.choice(links)) + right)[:max_len]
    if len(word) < 2:
        word = word + "ab"
    counts = {}
    vocab = pieces + [left + "e", word, word[:4], word[-4:], word[:5], word[-3:]]
    for w in rng.choice(vocab, size=int(rng.integers(0, max_words + 1))):
        counts[str(w)] = int(rng.integers(1, 30))
    return word, Lexicon(counts)


def annotated_set(n: int, dim: int, seed: int = 0, prevalence: float = 0.2):
    """Compounds with a vector table in which idiomaticity is (noisily) encoded in the compound vector."""
    from dekompost.embeddings import EmbeddingTable

    rng = np.random.default_rng(seed)
    entries = pseudo_compounds(n, seed=seed + 1, n_roots=60)
    items, vectors = [], {}
    for e in entries:
        idiomatic = rng.random() < prevalence
        category = int(rng.integers(1, 4)) if idiomatic else 0
        items.append(AnnotatedCompound(CompoundEntry(e.surface, e.modifier, e.head, int(rng.integers(1, 100))), category))
        v = rng.normal(size=dim)
        v[0] = (2.0 if idiomatic else -2.0) + rng.normal(scale=0.7)
        vectors[e.surface] = v
        for part in (e.modifier, e.head):
            vectors.setdefault(part, rng.normal(size=dim))
    return items, EmbeddingTable.from_dict(vectors, dim)
