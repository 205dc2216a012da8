"""Reproduce the splitting and idiomaticity comparisons on real data.

Needs a compound split file, an annotated idiomaticity file and pretrained
300-d word vectors; none of these ship with the package. Either pass paths
on the command line or set the environment variables read by
``paths_from_env``.

    python scripts/reproduce.py --split-data compounds.tsv \
        --annotated annotated.tsv --vectors w2v.vec [--ngram-vectors ft_ngrams.vec]
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from collections import defaultdict

import numpy as np

from dekompost import corpus, evalx, idiom, splitters
from dekompost.embeddings import UNK_TOKEN, load_text_vectors
from dekompost.neuro import LabelerConfig, build_vocab, prepare_examples, train
from dekompost.tokenization import char_tokenize

log = logging.getLogger("reproduce")

ENV = {
    "split_data": "DEKOMPOST_SPLIT_DATA",
    "annotated": "DEKOMPOST_ANNOTATED_DATA",
    "vectors": "DEKOMPOST_VECTORS",
    "ngram_vectors": "DEKOMPOST_NGRAM_VECTORS",
    "lexicon": "DEKOMPOST_LEXICON",
}


def paths_from_env() -> dict[str, str | None]:
    return {key: os.environ.get(var) or None for key, var in ENV.items()}


def _partition_by_surface(entries, seed):
    """Keep all readings of one compound in the same part."""
    groups = defaultdict(list)
    for e in entries:
        groups[e.surface].append(e)
    part = corpus.partition(sorted(groups), seed=seed)
    return tuple([e for s in names for e in groups[s]] for names in (part.train, part.dev, part.test))


def _first_reading(entries):
    seen, out = set(), []
    for e in entries:
        if e.surface not in seen:
            seen.add(e.surface)
            out.append(e)
    return out


def run_splitting(split_path, lexicon_path=None, *, seed=13, hidden=256, epochs=30, batch_size=64, lr=1e-3):
    entries = corpus.parse_split_file(split_path)
    train_e, dev_e, test_e = _partition_by_surface(entries, seed)
    test_e = _first_reading(test_e)
    gold = [None if isinstance(g, Exception) else g for g in map(_safe_boundary, test_e)]
    lexicon = corpus.build_lexicon(train_e, extra=lexicon_path)
    words = [e.surface for e in test_e]
    scores = {}

    freq = splitters.FrequencySplitter(lexicon)
    scores["frequency"] = evalx.split_accuracy([freq.split(w) for w in words], gold).accuracy
    ngram = splitters.NgramSplitter(splitters.collect_ngram_stats(lexicon))
    scores["ngram"] = evalx.split_accuracy([ngram.split(w) for w in words], gold).accuracy

    vocab = build_vocab(char_tokenize(e.surface).tokens for e in train_e)
    cfg = LabelerConfig(vocab=vocab, cell_kind="gru", hidden_dim=hidden, epochs=epochs, batch_size=batch_size,
                        learning_rate=lr, seed=seed)
    train_set, _ = prepare_examples(train_e, cfg.tokenize, vocab)
    dev_set, _ = prepare_examples(_first_reading(dev_e), cfg.tokenize, vocab)
    t0 = time.time()
    result = train(cfg, train_set, dev_set or None)
    log.info("labeler trained in %.0f s", time.time() - t0)
    neural = splitters.NeuralSplitter(result.best_params, cfg)
    scores["char_gru"] = evalx.split_accuracy(neural.split_many(words), gold).accuracy
    return scores


def _safe_boundary(entry):
    try:
        return corpus.derive_boundary(entry)
    except corpus.UnalignableError as exc:
        return exc


def run_idiom(annotated_path, vectors_path, ngram_vectors_path=None, *, seed=13):
    items = corpus.parse_annotated_file(annotated_path)
    part = corpus.partition(items, seed=seed)
    train_items, test_items = part.train + part.dev, part.test
    tables = {}
    w2v = load_text_vectors(vectors_path)
    tables["word2vec"] = w2v.with_policy("unk_token" if UNK_TOKEN in w2v else "zero")
    if ngram_vectors_path:
        tables["fastText"] = w2v.with_policy("ngram_compose", load_text_vectors(ngram_vectors_path))
    y_test = np.array([idiom.binarize_category(c.category) for c in test_items])
    scores = {"dummy": evalx.binary_prf1(idiom.dummy_predict(len(test_items)), y_test).f1}
    for name, table in tables.items():
        X_tr, y_tr = idiom.feature_matrix(train_items, table)
        X_te, _ = idiom.feature_matrix(test_items, table)
        logreg = idiom.train_logreg(X_tr, y_tr)
        scores[f"{name}_logreg"] = evalx.binary_prf1(idiom.predict_logreg(logreg, X_te)[0], y_test).f1
        gbdt = idiom.train_gbdt(X_tr, y_tr)
        scores[f"{name}_gbdt"] = evalx.binary_prf1(idiom.predict_gbdt(gbdt, X_te)[0], y_test).f1
    return scores


def check(split_scores: dict | None, idiom_scores: dict | None) -> list[str]:
    """Failed relative claims; an empty list means everything holds."""
    failures = []
    if split_scores is not None:
        for base in ("frequency", "ngram"):
            if not split_scores["char_gru"] > split_scores[base]:
                failures.append(f"char_gru {split_scores['char_gru']:.4f} <= {base} {split_scores[base]:.4f}")
    if idiom_scores is not None:
        for name, f1 in idiom_scores.items():
            if name != "dummy" and not f1 > idiom_scores["dummy"]:
                failures.append(f"{name} F1 {f1:.4f} <= dummy {idiom_scores['dummy']:.4f}")
    return failures


def main(argv=None) -> int:
    env = paths_from_env()
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--split-data", default=env["split_data"])
    ap.add_argument("--lexicon", default=env["lexicon"], help="extra word<TAB>count file")
    ap.add_argument("--annotated", default=env["annotated"])
    ap.add_argument("--vectors", default=env["vectors"])
    ap.add_argument("--ngram-vectors", default=env["ngram_vectors"])
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--hidden", type=int, default=256)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    out = {}
    if args.split_data:
        out["splitting"] = run_splitting(args.split_data, args.lexicon, epochs=args.epochs, hidden=args.hidden)
    if args.annotated and args.vectors:
        out["idiom"] = run_idiom(args.annotated, args.vectors, args.ngram_vectors)
    if not out:
        ap.error("no data given")
    out["reference"] = {"split_accuracy": evalx.REFERENCE_SPLIT_ACCURACY, "idiom_f1": evalx.REFERENCE_IDIOM_F1}
    print(json.dumps(out, indent=2))
    failures = check(out.get("splitting"), out.get("idiom"))
    for f in failures:
        print("FAIL", f)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
