"""Idiomaticity classification from compound and component embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import container, kernels
from .container import Container, ModelFormatError
from .corpus import AnnotatedCompound
from .embeddings import EmbeddingTable, embed_word
from .splitters import SplitResult

FEATURE_LAYOUT = "compound|modifier|head"


def binarize_category(category: int) -> int:
    """0 stays non-idiomatic; 1, 2 and 3 count as idiomatic."""
    if category not in (0, 1, 2, 3):
        raise ValueError(f"category out of range: {category!r}")
    return 0 if category == 0 else 1


# -- features ----------------------------------------------------------------

@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    provenance: str = "gold"  # gold | neural


def component_words(compound: AnnotatedCompound, split: SplitResult | None = None) -> tuple[str, str]:
    """(modifier, head) from the gold annotation or from a predicted split's surface parts."""
    if split is None:
        return compound.entry.modifier.split("|")[0], compound.entry.head
    if split.method == "none":
        return split.left, split.left
    return split.left, split.right


def build_features(compound: AnnotatedCompound, split: SplitResult | None, table: EmbeddingTable) -> FeatureVector:
    """Concatenate embed(compound) ‖ embed(modifier) ‖ embed(head)."""
    modifier, head = component_words(compound, split)
    values = np.concatenate([
        embed_word(table, compound.entry.surface),
        embed_word(table, modifier),
        embed_word(table, head),
    ]).astype(np.float64)
    return FeatureVector(values, "gold" if split is None else "neural")


def feature_matrix(compounds: Sequence[AnnotatedCompound], table: EmbeddingTable,
                   splits: Sequence[SplitResult] | None = None) -> tuple[np.ndarray, np.ndarray]:
    rows = [build_features(c, None if splits is None else splits[k], table).values for k, c in enumerate(compounds)]
    X = np.stack(rows) if rows else np.zeros((0, 3 * table.dim))
    y = np.array([binarize_category(c.category) for c in compounds], dtype=np.int64)
    return X, y


def _check_binary(y: np.ndarray) -> None:
    labels = set(np.unique(y).tolist())
    if not labels <= {0, 1}:
        raise ValueError("labels must be 0/1")
    if labels != {0, 1}:
        raise ValueError("training data must contain both classes")


# -- logistic regression -----------------------------------------------------

def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    C: float = 1.0
    n_iter: int = 0
    loss_history: list[float] = field(default_factory=list, repr=False)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def logreg_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float) -> tuple[float, np.ndarray, float]:
    """Mean logistic loss + ||w||^2 / (2 C N) and its gradient (bias unregularized)."""
    n = X.shape[0]
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + float(w @ w) / (2.0 * C * n)
    r = (_sigmoid(z) - y) / n
    return loss, X.T @ r + w / (C * n), float(r.sum())


def train_logreg(X: np.ndarray, y: np.ndarray, C: float = 1.0, max_iter: int = 1000, tol: float = 1e-6) -> LogRegModel:
    """Full-batch gradient descent from zero with Armijo backtracking.

    Stops when the gradient norm drops below ``tol`` or after ``max_iter`` steps.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] < 2:
        raise ValueError("need at least two aligned examples")
    if not C > 0:
        raise ValueError("C must be positive")
    _check_binary(y)
    w = np.zeros(X.shape[1])
    b = 0.0
    loss, gw, gb = logreg_objective(w, b, X, y, C)
    history = [loss]
    step = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        gnorm2 = float(gw @ gw) + gb * gb
        if np.sqrt(gnorm2) < tol:
            it -= 1
            break
        step *= 2.0
        while True:
            w_new, b_new = w - step * gw, b - step * gb
            new_loss, gw_new, gb_new = logreg_objective(w_new, b_new, X, y, C)
            if new_loss <= loss - 0.5 * step * gnorm2 or step < 1e-20:
                break
            step *= 0.5
        if new_loss > loss:
            break
        w, b, loss, gw, gb = w_new, b_new, new_loss, gw_new, gb_new
        history.append(loss)
    return LogRegModel(w, b, C, it, history)


def _as_2d(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    X = x[None, :] if x.ndim == 1 else x
    if X.ndim != 2 or X.shape[1] != dim:
        raise ValueError(f"feature dimension {X.shape[-1]} does not match model dimension {dim}")
    return X


def predict_logreg(model: LogRegModel, x: np.ndarray):
    """(label, probability); arrays when ``x`` is a matrix."""
    X = _as_2d(x, model.dim)
    p = _sigmoid(X @ model.weights + model.bias)
    labels = (p >= 0.5).astype(np.int64)
    if np.ndim(x) == 1:
        return int(labels[0]), float(p[0])
    return labels, p


# -- gradient boosting -------------------------------------------------------

@dataclass
class Tree:
    """Flat node arrays; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    cover: np.ndarray  # weighted training count per node

    def apply(self, X: np.ndarray) -> np.ndarray:
        return kernels.active.tree_apply(X, self.feature, self.threshold, self.left, self.right, self.value)

    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.feature < 0)


@dataclass
class GbdtModel:
    trees: list[Tree]
    init_score: float
    dim: int
    n_estimators: int = 200
    min_leaf: float = 25.0
    shrinkage: float = 0.1
    max_depth: int = 3
    class_weights: tuple[float, float] = (1.0, 10.0)
    reg_lambda: float = 1.0
    loss_history: list[float] = field(default_factory=list, repr=False)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = _as_2d(X, self.dim)
        score = np.full(X.shape[0], self.init_score)
        for tree in self.trees:
            score = score + tree.apply(X)
        return score


def weighted_logloss(score: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    return float(np.sum(w * (np.logaddexp(0.0, score) - y * score)) / np.sum(w))


def _f32_ceil(x: float) -> float:
    """Smallest float32 value >= x."""
    y = np.float32(x)
    if float(y) < x:
        y = np.nextafter(y, np.float32(np.inf))
    return float(y)


def _fit_tree(X, order, g, h, cnt, min_leaf, max_depth, lam, shrinkage, kern) -> tuple[Tree, np.ndarray]:
    """Depth-limited second-order regression tree. Returns the tree and each row's leaf node."""
    N = X.shape[0]
    feature, threshold, left, right, value, cover = [], [], [], [], [], []
    node_of = np.zeros(N, dtype=np.int64)

    def new_node(rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        G, Hs = float(g[rows].sum()), float(h[rows].sum())
        # leaf values live in float32 so a saved model predicts exactly like the trained one
        value.append(float(np.float32(shrinkage * G / (Hs + lam))))
        cover.append(float(cnt[rows].sum()))
        return len(feature) - 1

    frontier = [(new_node(np.ones(N, dtype=bool)), 0)]
    while frontier:
        node, depth = frontier.pop(0)
        rows = node_of == node
        if depth >= max_depth or cover[node] < 2 * min_leaf:
            continue
        G, Hs = float(g[rows].sum()), float(h[rows].sum())
        f, thr, gain = kern.best_split(X, order, rows, g, h, cnt, G, Hs, cover[node], float(min_leaf), float(lam))
        if f < 0:
            continue
        thr = _f32_ceil(thr)
        go_left = rows & (X[:, f] <= thr)
        go_right = rows & ~go_left
        if cnt[go_left].sum() < min_leaf or cnt[go_right].sum() < min_leaf:
            continue  # float32 rounding merged two distinct values
        feature[node], threshold[node] = int(f), float(thr)
        l_id = new_node(go_left)
        r_id = new_node(go_right)
        left[node], right[node] = l_id, r_id
        node_of[go_left] = l_id
        node_of[go_right] = r_id
        frontier.append((l_id, depth + 1))
        frontier.append((r_id, depth + 1))
    tree = Tree(
        np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64), np.array(value), np.array(cover),
    )
    return tree, node_of


def train_gbdt(X: np.ndarray, y: np.ndarray, n_estimators: int = 200, min_leaf: float = 25.0,
               shrinkage: float = 0.1, max_depth: int = 3, class_weights: tuple[float, float] = (1.0, 10.0),
               reg_lambda: float = 1.0, max_halvings: int = 30) -> GbdtModel:
    """Boosted trees on class-weighted logistic loss.

    Each round fits a tree to the weighted gradients and hessians with exact
    greedy splits; leaves must carry ``min_leaf`` class-weighted examples.
    A round whose tree would raise the training loss has its leaf values
    halved until it does not (a zero tree in the limit), so the weighted loss
    never increases.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X and y are not aligned")
    _check_binary(y)
    w = np.where(y > 0, class_weights[1], class_weights[0]).astype(np.float64)
    w_pos, w_neg = float(w[y > 0].sum()), float(w[y == 0].sum())
    init = float(np.float32(np.log(w_pos / w_neg)))
    score = np.full(X.shape[0], init)
    # stable sort keeps equal values in row order for both kernel backends
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="mergesort").T)
    kern = kernels.active
    model = GbdtModel([], init, X.shape[1], n_estimators, min_leaf, shrinkage, max_depth,
                      tuple(class_weights), reg_lambda)
    loss = weighted_logloss(score, y, w)
    model.loss_history.append(loss)
    for _ in range(n_estimators):
        p = _sigmoid(score)
        g = w * (y - p)  # negative gradient
        h = w * p * (1.0 - p)
        tree, node_of = _fit_tree(X, order, g, h, w, min_leaf, max_depth, reg_lambda, shrinkage, kern)
        step = tree.value[node_of]
        new_score = score + step
        new_loss = weighted_logloss(new_score, y, w)
        halvings = 0
        while new_loss > loss and halvings < max_halvings:
            tree.value *= 0.5
            step = step * 0.5
            new_score = score + step
            new_loss = weighted_logloss(new_score, y, w)
            halvings += 1
        if new_loss > loss:
            tree.value[:] = 0.0
            new_score, new_loss = score, loss
        model.trees.append(tree)
        score, loss = new_score, new_loss
        model.loss_history.append(loss)
    return model


def predict_gbdt(model: GbdtModel, x: np.ndarray):
    p = _sigmoid(model.decision_function(x))
    labels = (p >= 0.5).astype(np.int64)
    if np.ndim(x) == 1:
        return int(labels[0]), float(p[0])
    return labels, p


def dummy_predict(n: int) -> np.ndarray:
    """The always-idiomatic baseline."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return np.ones(n, dtype=np.int64)


# -- persistence -------------------------------------------------------------

def save_classifier(model: LogRegModel | GbdtModel, path: str | Path, table_dim: int | None = None) -> None:
    if isinstance(model, LogRegModel):
        c = Container("logreg", {"feature_layout": FEATURE_LAYOUT, "dim": str(model.dim), "C": repr(model.C)},
                      blocks={"logreg.w": model.weights, "logreg.b": np.array([model.bias])})
    elif isinstance(model, GbdtModel):
        cfg = {
            "feature_layout": FEATURE_LAYOUT,
            "dim": str(model.dim),
            "n_estimators": str(model.n_estimators),
            "min_leaf": repr(float(model.min_leaf)),
            "shrinkage": repr(model.shrinkage),
            "max_depth": str(model.max_depth),
            "class_weights": ",".join(repr(float(v)) for v in model.class_weights),
            "reg_lambda": repr(model.reg_lambda),
            "n_trees": str(len(model.trees)),
        }
        blocks = {"gbdt.init": np.array([model.init_score])}
        for k, t in enumerate(model.trees):
            for part in ("feature", "threshold", "left", "right", "value"):
                blocks[f"tree.{k}.{part}"] = getattr(t, part).astype(np.float64)
        c = Container("gbdt", cfg, blocks=blocks)
    else:
        raise TypeError(f"cannot save {type(model).__name__}")
    if table_dim is not None:
        c.config["embedding_dim"] = str(table_dim)
    container.write(c, path)


def load_classifier(path: str | Path) -> LogRegModel | GbdtModel:
    c = container.read(path)
    if c.config.get("feature_layout") != FEATURE_LAYOUT:
        raise ModelFormatError("unknown feature layout")
    if c.kind == "logreg":
        return LogRegModel(c.blocks["logreg.w"].copy(), float(c.blocks["logreg.b"][0]), float(c.config["C"]))
    if c.kind == "gbdt":
        cfg = c.config
        trees = []
        for k in range(int(cfg["n_trees"])):
            b = {part: c.blocks[f"tree.{k}.{part}"] for part in ("feature", "threshold", "left", "right", "value")}
            trees.append(Tree(b["feature"].astype(np.int64), b["threshold"].copy(), b["left"].astype(np.int64),
                              b["right"].astype(np.int64), b["value"].copy(), np.zeros(len(b["value"]))))
        return GbdtModel(trees, float(c.blocks["gbdt.init"][0]), int(cfg["dim"]), int(cfg["n_estimators"]),
                         float(cfg["min_leaf"]), float(cfg["shrinkage"]), int(cfg["max_depth"]),
                         tuple(float(v) for v in cfg["class_weights"].split(",")), float(cfg["reg_lambda"]))
    raise ModelFormatError(f"{path} holds a {c.kind!r} model, not a classifier")
