"""Command-line entry point: ``dekompost <group> <action> [options]``.

Every option can also be set in a ``--config`` file of ``key = value`` lines
(``#`` starts a comment; keys use the option name without dashes, with '-'
or '_'). Explicit flags win over the config file. ``DEKOMPOST_SEED`` sets the
seed when neither a flag nor the config file does.

Exit status: 0 success, 1 usage error, 2 data error. Metric lines start with
``RESULT `` followed by ``key=value`` pairs.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import corpus, evalx, idiom, splitters
from .container import ModelFormatError
from .embeddings import OOV_POLICIES, EmbeddingError, load_text_vectors
from .tokenization import bpe_train, char_tokenize, load_merges

log = logging.getLogger("dekompost")

DEFAULT_SEED = 13
EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

FORMATS_HELP = """file formats:
  split file      surface<TAB>modifier<TAB>head[<TAB>frequency]; '|' separates modifier readings
  annotated file  frequency<TAB>surface<TAB>modifier<TAB>head<TAB>category (0-3)
  frequency file  word<TAB>count
  vector file     first line 'count dim', then 'word v1 ... vdim'
  merges file     '#version' header, then one 'left right' merge per line
  model file      binary DKMP container (labeler or classifier)
  config file     'key = value' lines, '#' comments"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- option registry ---------------------------------------------------------

@dataclass
class _Command:
    name: str
    handler: Callable[[dict], int]
    parser: argparse.ArgumentParser
    options: dict[str, tuple[Callable[[str], Any], Any]] = field(default_factory=dict)

    def opt(self, flag: str, *, type=str, default=None, help: str = "", choices=None, required=False, flag_only=False):
        dest = flag.lstrip("-").replace("-", "_")
        if type is bool:
            self.parser.add_argument(flag, dest=dest, action="store_true", default=argparse.SUPPRESS, help=help)
            conv = _parse_bool
        else:
            shown = f" (default: {default})" if default is not None else (" (required)" if required else "")
            self.parser.add_argument(flag, dest=dest, type=type, choices=choices, default=argparse.SUPPRESS,
                                     help=help + shown, metavar=dest.upper() if choices is None else None)
            conv = type
        if not flag_only:
            self.options[dest] = (conv, default, choices, required)


def _parse_bool(s: str) -> bool:
    low = str(s).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _ratios(s: str) -> tuple[float, float, float]:
    parts = tuple(float(x) for x in s.split(","))
    if len(parts) != 3:
        raise ValueError("expected three comma-separated ratios")
    return parts


def _weights(s: str) -> tuple[float, float]:
    parts = tuple(float(x) for x in s.split(","))
    if len(parts) != 2:
        raise ValueError("expected two comma-separated class weights")
    return parts


def read_config_file(path: str | Path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"{path}: line {lineno}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve(cmd: _Command, ns: argparse.Namespace) -> dict:
    explicit = {k: v for k, v in vars(ns).items() if k in cmd.options}
    from_file = {}
    if getattr(ns, "config", None):
        for key, raw in read_config_file(ns.config).items():
            if key not in cmd.options:
                log.warning("config key %r is not used by '%s'; ignored", key, cmd.name)
                continue
            conv, _, choices, _ = cmd.options[key]
            try:
                value = conv(raw)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
            if choices is not None and value not in choices:
                raise UsageError(f"config key {key!r}: {value!r} is not one of {list(choices)}")
            from_file[key] = value
    cfg = {k: default for k, (_, default, _, _) in cmd.options.items()}
    if "seed" in cmd.options and "DEKOMPOST_SEED" in os.environ:
        try:
            cfg["seed"] = int(os.environ["DEKOMPOST_SEED"])
        except ValueError:
            raise UsageError("DEKOMPOST_SEED must be an integer") from None
    cfg.update(from_file)
    cfg.update(explicit)
    missing = [k for k, (_, _, _, req) in cmd.options.items() if req and cfg.get(k) is None]
    if missing:
        raise UsageError(f"{cmd.name}: missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return cfg


def _print_config(name: str, cfg: dict) -> None:
    shown = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(cfg.items()))
    print(f"CONFIG command={name.replace(' ', '.')} {shown}")
    print(f"SEED {cfg.get('seed', DEFAULT_SEED)}")


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return ",".join(map(str, v))
    if isinstance(v, bool):
        return "true" if v else "false"
    return "none" if v is None else str(v)


def _result(**pairs) -> None:
    print("RESULT " + " ".join(f"{k}={_fmt_num(v)}" for k, v in pairs.items()))


def _fmt_num(v) -> str:
    return f"{v:.6f}" if isinstance(v, float) else _fmt(v)


# -- shared loaders ----------------------------------------------------------

def _lexicon(cfg: dict) -> corpus.Lexicon:
    if not cfg.get("lexicon"):
        raise UsageError("--lexicon is required for this method")
    return corpus.Lexicon(corpus.read_frequency_file(cfg["lexicon"]))


def _splitter(cfg: dict):
    method = cfg["method"]
    if method == "frequency":
        table = splitters.TransformTable.load(cfg["transforms"]) if cfg.get("transforms") else splitters.DEFAULT_TRANSFORMS
        return splitters.FrequencySplitter(_lexicon(cfg), table)
    if method == "ngram":
        return splitters.NgramSplitter(splitters.collect_ngram_stats(_lexicon(cfg)))
    if not cfg.get("model"):
        raise UsageError("--model is required for the neural method")
    from .neuro import load_params

    params, config = load_params(cfg["model"])
    return splitters.NeuralSplitter(params, config)


def _split_all(splitter, words: list[str]) -> list[splitters.SplitResult]:
    if isinstance(splitter, splitters.NeuralSplitter):
        return splitter.split_many(words)
    return [splitter.split(w) for w in words]


def _gold(entries) -> list[corpus.BoundaryLabel | None]:
    out = []
    for e in entries:
        try:
            out.append(corpus.derive_boundary(e))
        except corpus.UnalignableError:
            out.append(None)
    return out


def _table(cfg: dict):
    if not cfg.get("vectors"):
        raise UsageError("--vectors is required")
    table = load_text_vectors(cfg["vectors"], cfg["oov"])
    if cfg.get("ngram_vectors"):
        table = table.with_policy(cfg["oov"], load_text_vectors(cfg["ngram_vectors"]))
    return table


def _features(cfg: dict, items: list[corpus.AnnotatedCompound]) -> tuple[np.ndarray, np.ndarray]:
    table = _table(cfg)
    splits = None
    if cfg["components"] == "neural":
        if not cfg.get("split_model"):
            raise UsageError("--split-model is required with --components neural")
        from .neuro import load_params

        params, config = load_params(cfg["split_model"])
        splits = splitters.NeuralSplitter(params, config).split_many([c.surface for c in items])
    return idiom.feature_matrix(items, table, splits)


# -- handlers ----------------------------------------------------------------

def cmd_corpus_stats(cfg: dict) -> int:
    entries = corpus.parse_split_file(cfg["data"])
    s = corpus.dataset_stats(entries)
    _result(entries=s.entries, compounds=s.compounds, modifiers=s.modifiers, heads=s.heads,
            hapax_modifiers=s.hapax_modifiers, hapax_heads=s.hapax_heads, unalignable=s.unalignable)
    for rule, count in sorted(s.rules.items()):
        print(f"  boundary rule {rule}: {count}")
    return EXIT_OK


def cmd_corpus_partition(cfg: dict) -> int:
    annotated = cfg["format"] == "annotated"
    items = corpus.parse_annotated_file(cfg["data"]) if annotated else corpus.parse_split_file(cfg["data"])
    part = corpus.partition(items, cfg["ratios"], cfg["seed"])
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    writer = corpus.write_annotated_file if annotated else corpus.write_split_file
    for name in ("train", "dev", "test"):
        writer(getattr(part, name), out / f"{name}.tsv")
    n_train, n_dev, n_test = part.sizes
    _result(train=n_train, dev=n_dev, test=n_test)
    return EXIT_OK


def cmd_bpe_train(cfg: dict) -> int:
    entries = corpus.parse_split_file(cfg["data"])
    words = [e.surface.lower() if cfg["lowercase"] else e.surface for e in entries]
    model = bpe_train(words, cfg["vocab_size"])
    model.save(cfg["out"])
    _result(merges=len(model.merges), vocab=len(model.vocab))
    return EXIT_OK


def _ints(s: str) -> tuple[int, ...]:
    parts = tuple(int(x) for x in s.split(",") if x.strip())
    if not parts:
        raise ValueError("expected comma-separated integers")
    return parts


def cmd_split_train(cfg: dict) -> int:
    from .neuro import LabelerConfig, build_vocab, init_params, load_subword_embeddings, prepare_examples, save_params, train

    entries = corpus.parse_split_file(cfg["data"])
    dev_entries = corpus.parse_split_file(cfg["dev"]) if cfg.get("dev") else []
    merges: tuple = ()
    if cfg["tokenizer"] == "bpe":
        if cfg.get("merges"):
            bpe = load_merges(cfg["merges"])
        elif cfg.get("bpe_vocab_size"):
            bpe = bpe_train([e.surface for e in entries], cfg["bpe_vocab_size"])
        else:
            raise UsageError("--tokenizer bpe needs --merges or --bpe-vocab-size")
        merges = bpe.merges
        tokenize = bpe.encode
    else:
        tokenize = char_tokenize
    seeds = cfg.get("seeds")
    if seeds and not dev_entries:
        raise UsageError("--seeds needs --dev to evaluate each run")

    vocab = build_vocab(tokenize(e.surface).tokens for e in entries)
    out = Path(cfg["out"])

    def run_one(seed: int, path: Path):
        embed_dim = cfg["embed_dim"]
        pretrained = None
        if cfg.get("embeddings"):
            pretrained = load_subword_embeddings(cfg["embeddings"], vocab, None, seed)
            embed_dim = pretrained.shape[1]
        config = LabelerConfig(
            vocab=vocab, cell_kind=cfg["cell"], hidden_dim=cfg["hidden"], embed_dim=embed_dim,
            embeddings_trainable=not cfg["freeze_embeddings"], epochs=cfg["epochs"], learning_rate=cfg["lr"],
            batch_size=cfg["batch_size"], seed=seed, clip_norm=cfg.get("clip_norm"),
            tokenizer=cfg["tokenizer"], bpe_merges=tuple(merges),
        )
        train_set, stats = prepare_examples(entries, config.tokenize, vocab)
        dev_set, _ = prepare_examples(dev_entries, config.tokenize, vocab) if dev_entries else ([], None)
        print(f"examples train={stats.kept} dev={len(dev_set)} unalignable={stats.unalignable} "
              f"single_token={stats.single_token} lossy_rate={stats.lossy_rate:.6f}")
        params = None
        if pretrained is not None:
            init_seq = np.random.SeedSequence(config.seed).spawn(2)[0]
            params = init_params(config, seed=int(init_seq.generate_state(1)[0]), embeddings=pretrained)

        def report(rec):
            dev = "none" if rec.dev_accuracy is None else f"{rec.dev_accuracy:.6f}"
            print(f"epoch={rec.epoch} train_loss={rec.train_loss:.6f} dev_accuracy={dev}", flush=True)

        result = train(config, train_set, dev_set or None, params=params, on_epoch=report)
        save_params(result.params, config, path)
        best = path.with_name(path.stem + ".best" + path.suffix)
        save_params(result.best_params, config, best)
        return result, best

    if not seeds:
        result, best = run_one(cfg["seed"], out)
        last = result.log[-1] if result.log else None
        _result(epochs=len(result.log), final_loss=last.train_loss if last else float("nan"),
                best_epoch=result.best_epoch, model=str(out), best_model=str(best))
        return EXIT_OK

    # one model per seed; the spread over seeds is the run-to-run variation
    finals, bests = [], []
    for seed in seeds:
        path = out.with_name(f"{out.stem}.seed{seed}{out.suffix}")
        result, _ = run_one(seed, path)
        finals.append(result.log[-1].dev_accuracy)
        bests.append(max(rec.dev_accuracy for rec in result.log))
        _result(seed=seed, final_dev_accuracy=finals[-1], best_dev_accuracy=bests[-1], model=str(path))
    _result(seeds=len(seeds), final_dev_accuracy_mean=float(np.mean(finals)), final_dev_accuracy_std=float(np.std(finals)),
            best_dev_accuracy_mean=float(np.mean(bests)), best_dev_accuracy_std=float(np.std(bests)))
    return EXIT_OK


def _read_words(cfg: dict) -> list[str]:
    words = list(cfg.get("words") or [])
    if cfg.get("input"):
        with open(cfg["input"], encoding="utf-8") as fh:
            words.extend(line.strip().split("\t")[0] for line in fh if line.strip() and not line.startswith("#"))
    if not words:
        raise UsageError("no words given (positional words or --input)")
    return words


def cmd_split_run(cfg: dict) -> int:
    words = _read_words(cfg)
    results = _split_all(_splitter(cfg), words)
    for word, res in zip(words, results):
        print(f"{word}\t{res}\t{res.score:.6g}")
    _result(n=len(words), split=sum(r.boundary is not None for r in results))
    return EXIT_OK


def cmd_split_eval(cfg: dict) -> int:
    entries = corpus.parse_split_file(cfg["data"])
    splitter = _splitter(cfg)
    preds = _split_all(splitter, [e.surface for e in entries])
    gold = _gold(entries)
    metrics = evalx.split_accuracy(preds, gold)
    print(metrics.result_line())
    print(evalx.reference_footer())
    if cfg.get("errors"):
        rep = evalx.error_report(preds, entries, gold)
        rep.write(cfg["errors"])
        print(rep.summary(), end="")
    return EXIT_OK


def _annotated(cfg: dict) -> list[corpus.AnnotatedCompound]:
    return corpus.parse_annotated_file(cfg["data"])


def cmd_idiom_featurize(cfg: dict) -> int:
    items = _annotated(cfg)
    X, y = _features(cfg, items)
    np.savez(cfg["out"], X=X, y=y, surfaces=np.array([c.surface for c in items]))
    _result(n=X.shape[0], dim=X.shape[1], positives=int(y.sum()))
    return EXIT_OK


def _load_xy(cfg: dict) -> tuple[np.ndarray, np.ndarray, list[corpus.AnnotatedCompound] | None]:
    if cfg.get("features"):
        with np.load(cfg["features"]) as f:
            return f["X"], f["y"], None
    items = _annotated(cfg)
    X, y = _features(cfg, items)
    return X, y, items


def cmd_idiom_train(cfg: dict) -> int:
    if not cfg.get("data") and not cfg.get("features"):
        raise UsageError("--data or --features is required")
    X, y, _ = _load_xy(cfg)
    if cfg["classifier"] == "logreg":
        model = idiom.train_logreg(X, y, C=cfg["C"])
        labels, _ = idiom.predict_logreg(model, X)
    else:
        model = idiom.train_gbdt(X, y, n_estimators=cfg["n_estimators"], min_leaf=cfg["min_leaf"],
                                 shrinkage=cfg["shrinkage"], max_depth=cfg["max_depth"],
                                 class_weights=cfg["class_weights"])
        labels, _ = idiom.predict_gbdt(model, X)
    idiom.save_classifier(model, cfg["out"], X.shape[1] // 3)
    m = evalx.binary_prf1(labels, y)
    _result(train_f1=m.f1, n=len(y), model=cfg["out"])
    return EXIT_OK


def _predict(model, X):
    return idiom.predict_logreg(model, X) if isinstance(model, idiom.LogRegModel) else idiom.predict_gbdt(model, X)


def cmd_idiom_eval(cfg: dict) -> int:
    if cfg["classifier"] == "dummy":
        if not cfg.get("data"):
            raise UsageError("--data is required")
        items = _annotated(cfg)
        y = np.array([idiom.binarize_category(c.category) for c in items])
        labels = idiom.dummy_predict(len(items))
    else:
        if not cfg.get("model"):
            raise UsageError("--model is required for a trained classifier")
        model = idiom.load_classifier(cfg["model"])
        X, y, items = _load_xy(cfg)
        labels, _ = _predict(model, X)
    m = evalx.binary_prf1(labels, y)
    print(m.result_line())
    print("reference F1: " + " ".join(f"{k.replace(' ', '_')}={v}" for k, v in evalx.REFERENCE_IDIOM_F1.items()))
    if cfg.get("errors") and items is not None:
        rep = evalx.idiom_error_report(items, labels, cfg["top_k"])
        Path(cfg["errors"]).write_text(rep.summary(), encoding="utf-8")
        print(rep.summary(), end="")
    return EXIT_OK


def cmd_idiom_predict(cfg: dict) -> int:
    model = idiom.load_classifier(cfg["model"])
    items = _annotated(cfg)
    X, _ = _features(cfg, items)
    labels, probs = _predict(model, X)
    for c, lab, p in zip(items, labels, probs):
        print(f"{c.surface}\t{int(lab)}\t{p:.6f}")
    _result(n=len(items), idiomatic=int(np.sum(labels)))
    return EXIT_OK


def cmd_report_errors(cfg: dict) -> int:
    entries = corpus.parse_split_file(cfg["data"])
    preds = _split_all(_splitter(cfg), [e.surface for e in entries])
    gold = _gold(entries)
    rep = evalx.error_report(preds, entries, gold)
    rep.write(cfg["out"], cfg.get("summary"))
    print(rep.summary(), end="")
    _result(errors=len(rep), linking_confusions=len(rep.linking_confusions))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict[tuple[str, str], _Command]]:
    top = _Parser(prog="dekompost", description="German compound splitting and idiomaticity detection.",
                  epilog=FORMATS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    groups = top.add_subparsers(dest="group", metavar="{corpus,bpe,split,idiom,report}")
    commands: dict[tuple[str, str], _Command] = {}

    def group(name, help):
        p = groups.add_parser(name, help=help, description=help)
        return p.add_subparsers(dest="action", metavar="ACTION")

    def command(sub, group_name, name, handler, help):
        p = sub.add_parser(name, help=help, description=help, epilog=FORMATS_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", default=None, help="config file of 'key = value' lines; flags win")
        cmd = _Command(f"{group_name} {name}", handler, p)
        commands[(group_name, name)] = cmd
        return cmd

    def seed(cmd):
        cmd.opt("--seed", type=int, default=DEFAULT_SEED, help="random seed (env DEKOMPOST_SEED)")

    def splitter_opts(cmd):
        cmd.opt("--method", choices=("frequency", "ngram", "neural"), default="frequency", help="splitter family")
        cmd.opt("--lexicon", help="frequency file (frequency and ngram methods)")
        cmd.opt("--transforms", help="transform table file for the frequency method")
        cmd.opt("--model", help="labeler model file (neural method)")

    def vector_opts(cmd):
        cmd.opt("--vectors", help="word vector text file")
        cmd.opt("--ngram-vectors", help="character n-gram vector text file for --oov ngram_compose")
        cmd.opt("--oov", choices=OOV_POLICIES, default="zero", help="out-of-vocabulary policy")
        cmd.opt("--components", choices=("gold", "neural"), default="gold", help="where component words come from")
        cmd.opt("--split-model", help="labeler model file for --components neural")

    g = group("corpus", "inspect and partition data files")
    c = command(g, "corpus", "stats", cmd_corpus_stats, "dataset statistics of a split file")
    c.opt("--data", required=True, help="split file")
    c = command(g, "corpus", "partition", cmd_corpus_partition, "seeded train/dev/test partition")
    c.opt("--data", required=True, help="split or annotated file")
    c.opt("--format", choices=("split", "annotated"), default="split", help="input file format")
    c.opt("--out-dir", required=True, help="directory for train.tsv, dev.tsv, test.tsv")
    c.opt("--ratios", type=_ratios, default=corpus.DEFAULT_RATIOS, help="train,dev,test fractions")
    seed(c)

    g = group("bpe", "sub-word vocabulary")
    c = command(g, "bpe", "train", cmd_bpe_train, "learn BPE merges from compound surfaces")
    c.opt("--data", required=True, help="split file")
    c.opt("--vocab-size", type=int, required=True, help="target vocabulary size")
    c.opt("--lowercase", type=bool, help="lowercase surfaces before training")
    c.opt("--out", required=True, help="merges file to write")

    g = group("split", "compound splitters")
    c = command(g, "split", "train", cmd_split_train, "train the neural split labeler")
    c.opt("--data", required=True, help="training split file")
    c.opt("--dev", help="dev split file for per-epoch accuracy and best-model selection")
    c.opt("--cell", choices=("vanilla", "gru", "lstm"), default="gru", help="recurrent cell")
    c.opt("--tokenizer", choices=("char", "bpe"), default="char", help="input units")
    c.opt("--merges", help="BPE merges file (tokenizer bpe)")
    c.opt("--bpe-vocab-size", type=int, help="learn merges from the training data with this vocabulary size")
    c.opt("--embeddings", help="pretrained sub-word vector file")
    c.opt("--freeze-embeddings", type=bool, help="keep embeddings fixed")
    c.opt("--hidden", type=int, default=256, help="hidden units per direction")
    c.opt("--embed-dim", type=int, default=64, help="embedding size without pretrained vectors")
    c.opt("--epochs", type=int, default=30, help="training epochs")
    c.opt("--lr", type=float, default=1e-3, help="Adam learning rate")
    c.opt("--batch-size", type=int, default=64, help="batch size")
    c.opt("--clip-norm", type=float, help="global gradient norm clip")
    c.opt("--out", required=True, help="model file; the best-dev model goes to <stem>.best<suffix>")
    c.opt("--seeds", type=_ints, help="comma-separated seeds: train one model per seed (<stem>.seed<k><suffix>) "
          "and report mean and std of dev accuracy; needs --dev")
    seed(c)
    c = command(g, "split", "run", cmd_split_run, "split words")
    splitter_opts(c)
    c.parser.add_argument("words", nargs="*", help="words to split")
    c.options["words"] = (str, None, None, False)
    c.opt("--input", help="file with one word per line (first column)")
    c = command(g, "split", "eval", cmd_split_eval, "exact-boundary accuracy on a split file")
    splitter_opts(c)
    c.opt("--data", required=True, help="split file with gold components")
    c.opt("--errors", help="write an error TSV here")

    g = group("idiom", "idiomaticity classification")
    c = command(g, "idiom", "featurize", cmd_idiom_featurize, "build compound|modifier|head feature vectors")
    c.opt("--data", required=True, help="annotated file")
    vector_opts(c)
    c.opt("--out", required=True, help="output .npz with X, y, surfaces")
    c = command(g, "idiom", "train", cmd_idiom_train, "train a classifier")
    c.opt("--classifier", choices=("logreg", "gbdt"), default="gbdt", help="model family")
    c.opt("--data", help="annotated file")
    c.opt("--features", help=".npz from 'idiom featurize' instead of --data/--vectors")
    vector_opts(c)
    c.opt("--C", type=float, default=1.0, help="inverse regularization strength (logreg)")
    c.opt("--n-estimators", type=int, default=200, help="boosting rounds (gbdt)")
    c.opt("--min-leaf", type=float, default=25.0, help="minimum class-weighted examples per leaf (gbdt)")
    c.opt("--shrinkage", type=float, default=0.1, help="learning rate (gbdt)")
    c.opt("--max-depth", type=int, default=3, help="tree depth (gbdt)")
    c.opt("--class-weights", type=_weights, default=(1.0, 10.0), help="weights of class 0,1 (gbdt)")
    c.opt("--out", required=True, help="classifier model file")
    seed(c)
    c = command(g, "idiom", "eval", cmd_idiom_eval, "F1 of the idiomatic class")
    c.opt("--classifier", choices=("dummy", "trained"), default="trained", help="'dummy' is the always-idiomatic baseline")
    c.opt("--model", help="classifier model file")
    c.opt("--data", help="annotated file")
    c.opt("--features", help=".npz from 'idiom featurize'")
    vector_opts(c)
    c.opt("--errors", help="write the misclassification summary here")
    c.opt("--top-k", type=int, default=10, help="rows in the component frequency tables")
    c = command(g, "idiom", "predict", cmd_idiom_predict, "label compounds")
    c.opt("--model", required=True, help="classifier model file")
    c.opt("--data", required=True, help="annotated file (category column is ignored)")
    vector_opts(c)

    g = group("report", "error analysis")
    c = command(g, "report", "errors", cmd_report_errors, "split error TSV and summary")
    splitter_opts(c)
    c.opt("--data", required=True, help="split file")
    c.opt("--out", required=True, help="error TSV")
    c.opt("--summary", help="summary text file")
    return top, commands


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser, commands = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.group is None:
            raise UsageError("missing command")
        if getattr(ns, "action", None) is None:
            raise UsageError(f"missing action for '{ns.group}'")
        cmd = commands[(ns.group, ns.action)]
        cfg = resolve(cmd, ns)
        _print_config(cmd.name, cfg)
        return cmd.handler(cfg)
    except UsageError as exc:
        if str(exc).endswith("missing command") or "missing action" in str(exc):
            parser.print_help(sys.stderr)
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (corpus.CorpusError, EmbeddingError, ModelFormatError, OSError, UnicodeDecodeError, ValueError,
            FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
