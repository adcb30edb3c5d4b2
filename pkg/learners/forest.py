"""Random forest of Gini CART trees grown on weighted bootstrap resamples."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from config.exceptions import SingleClassError, ValidationError
from learners.base_learner import LearnerModel
from models.enums import LearnerKind
from models.learner import ForestConfig
from tools.seeding import derive_rng

logger = logging.getLogger(__name__)

LEAF = -1


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Axis-aligned binary tree stored as parallel node arrays.

    Rows with ``x[feature] <= threshold`` go left. ``feature == -1`` marks a
    leaf, whose ``value`` is its class-1 fraction.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            rows = np.flatnonzero(feat != LEAF)
            if rows.size == 0:
                return node
            current = node[rows]
            go_left = X[rows, feat[rows]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def equals(self, other: "DecisionTree") -> bool:
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("feature", "threshold", "left", "right", "value")
        )


@dataclass(frozen=True, eq=False)
class ForestModel(LearnerModel):
    """Scores are the mean leaf value over all trees."""
    trees: tuple[DecisionTree, ...]
    n_features: int

    kind = LearnerKind.FOREST

    def _predict(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def equals(self, other: "ForestModel") -> bool:
        return (
            self.n_features == other.n_features
            and len(self.trees) == len(other.trees)
            and all(a.equals(b) for a, b in zip(self.trees, other.trees))
        )


def _gini(n_pos: np.ndarray | float, n: np.ndarray | float):
    frac = n_pos / n
    return 2.0 * frac * (1.0 - frac)


def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    candidates: np.ndarray,
    min_leaf: int,
) -> tuple[int, float, float]:
    """(feature, threshold, weighted child impurity) of the best Gini split.

    Returns feature -1 when no candidate split respects ``min_leaf``.
    """
    size = rows.size
    labels = y[rows]
    total_pos = float(labels.sum())
    n_left = np.arange(1, size, dtype=np.float64)
    n_right = size - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)

    best = (LEAF, 0.0, math.inf)
    for feat in candidates:
        values = X[rows, feat]
        order = np.argsort(values, kind="stable")
        xs = values[order]
        left_pos = np.cumsum(labels[order])[:-1]
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        impurity = (
            n_left * _gini(left_pos, n_left)
            + n_right * _gini(total_pos - left_pos, n_right)
        ) / size
        impurity = np.where(valid, impurity, np.inf)
        i = int(np.argmin(impurity))
        if impurity[i] < best[2]:
            best = (int(feat), float((xs[i] + xs[i + 1]) / 2.0), float(impurity[i]))
    return best


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample: np.ndarray,
    cfg: ForestConfig,
    n_candidates: int,
    rng: np.random.Generator,
) -> DecisionTree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node(rows: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[rows].mean()))
        return len(feature) - 1

    stack = [(new_node(sample), sample, 0)]
    p = X.shape[1]
    while stack:
        node, rows, depth = stack.pop()
        n_pos = float(y[rows].sum())
        parent_impurity = _gini(n_pos, rows.size)
        if depth >= cfg.max_depth or rows.size < 2 * cfg.min_leaf or parent_impurity == 0.0:
            continue
        candidates = rng.choice(p, size=n_candidates, replace=False)
        feat, cut, impurity = _best_split(X, y, rows, candidates, cfg.min_leaf)
        if feat == LEAF or impurity >= parent_impurity - 1e-12:
            continue
        goes_left = X[rows, feat] <= cut
        left_rows, right_rows = rows[goes_left], rows[~goes_left]
        feature[node], threshold[node] = feat, cut
        left[node] = new_node(left_rows)
        right[node] = new_node(right_rows)
        stack.append((right[node], right_rows, depth + 1))
        stack.append((left[node], left_rows, depth + 1))

    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
    )


def _fill_leaves(tree: DecisionTree, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> DecisionTree:
    # Leaf values come from every weighted training row, not the bootstrap draw.
    leaves = tree.apply(X)
    mass = np.bincount(leaves, weights=w, minlength=tree.n_nodes)
    pos_mass = np.bincount(leaves, weights=w * y, minlength=tree.n_nodes)
    value = tree.value.copy()
    filled = mass > 0
    value[filled] = pos_mass[filled] / mass[filled]
    return DecisionTree(tree.feature, tree.threshold, tree.left, tree.right, value)


def fit_forest(X, y, w=None, cfg: ForestConfig | None = None) -> ForestModel:
    """Fit ``cfg.n_trees`` CART trees, each on a bootstrap drawn with P ∝ w.

    Splits minimize Gini impurity over ``features_per_split`` features drawn
    per node (default ceil(sqrt(p))). Tree t uses the stream (seed, t), so a
    fixed seed always reproduces the same forest.
    """
    cfg = cfg or ForestConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise ValidationError("X and y differ in length", {"n_rows": n, "n_labels": y.shape[0]})
    if n < 2:
        raise ValidationError("Forest needs at least 2 rows", {"n": n})
    if np.unique(y).size < 2:
        raise SingleClassError("Forest needs both classes", {"n": n})
    w = np.ones(n) if w is None else np.asarray(w, dtype=np.float64).ravel()
    if w.shape[0] != n or np.any(w < 0) or not np.any(w > 0):
        raise ValidationError("Weights must be >= 0, not all zero, one per row")

    n_candidates = min(p, cfg.features_per_split or math.ceil(math.sqrt(p)))
    probs = w / w.sum()
    trees = []
    for t in range(cfg.n_trees):
        rng = derive_rng(cfg.seed, t)
        sample = rng.choice(n, size=n, replace=True, p=probs)
        tree = _grow_tree(X, y, sample, cfg, n_candidates, rng)
        trees.append(_fill_leaves(tree, X, y, w))
    logger.debug("Forest fitted: %d trees, mean nodes %.1f",
                 len(trees), float(np.mean([t.n_nodes for t in trees])))
    return ForestModel(trees=tuple(trees), n_features=p)
