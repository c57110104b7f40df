"""Deterministic gradient-boosted decision trees for binary targets.

Trees are grown leaf-wise (best split anywhere in the tree first) with
exact split search over sorted unique feature values, second-order gain,
and optional row bagging and per-round feature subsampling. Everything
downstream of the seed is deterministic: ties break toward the lower
feature index, then the lower threshold, then the earlier-created leaf,
and the single generator is consumed in a fixed order (bag draw, then
feature draw, each round). This keeps fits reproducible bit-for-bit and
checkable against brute-force oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

PROB_EPS = 1e-15

# A split must beat the parent score by more than its floating-point
# cancellation noise; otherwise constant-gradient nodes (e.g. from a
# constant-label fit, where every true gain is exactly zero) would grow
# trees out of ~1e-29 rounding residue.
GAIN_NOISE_REL = 1e-12

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class MetaLearnerConfig:
    """Boosting hyperparameters.

    Defaults are the production meta-learner settings; ``seed`` feeds the
    single random generator used for bagging and feature subsampling.
    """

    objective: str = "binary_logloss"
    num_leaves: int = 34
    learning_rate: float = 0.05
    feature_fraction: float = 0.9
    bagging_fraction: float = 0.8
    bagging_freq: int = 5
    num_rounds: int = 100
    min_data_in_leaf: int = 20
    l2_leaf_regularization: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.objective != "binary_logloss":
            raise ValueError(f"unsupported objective {self.objective!r}")
        if self.num_leaves < 2:
            raise ValueError("num_leaves must be at least 2")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 < self.feature_fraction <= 1:
            raise ValueError("feature_fraction must be in (0, 1]")
        if not 0 < self.bagging_fraction <= 1:
            raise ValueError("bagging_fraction must be in (0, 1]")
        if self.bagging_freq < 1:
            raise ValueError("bagging_freq must be at least 1")
        if self.num_rounds < 0:
            raise ValueError("num_rounds must be nonnegative")
        if self.min_data_in_leaf < 1:
            raise ValueError("min_data_in_leaf must be at least 1")
        if self.l2_leaf_regularization < 0:
            raise ValueError("l2_leaf_regularization must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "num_leaves": self.num_leaves,
            "learning_rate": self.learning_rate,
            "feature_fraction": self.feature_fraction,
            "bagging_fraction": self.bagging_fraction,
            "bagging_freq": self.bagging_freq,
            "num_rounds": self.num_rounds,
            "min_data_in_leaf": self.min_data_in_leaf,
            "l2_leaf_regularization": self.l2_leaf_regularization,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "MetaLearnerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(cfg))


@dataclass
class TreeNode:
    """Binary tree node: internal (feature_index/threshold/children) or leaf (value)."""

    feature_index: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {
            "feature_index": self.feature_index,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, node: Mapping) -> "TreeNode":
        if "value" in node:
            return cls(value=float(node["value"]))
        return cls(
            feature_index=int(node["feature_index"]),
            threshold=float(node["threshold"]),
            left=cls.from_dict(node["left"]),
            right=cls.from_dict(node["right"]),
        )


@dataclass
class BoostedTrees:
    """A fitted booster: constant base score plus additive trees."""

    base_score: float
    trees: list[TreeNode]
    config: MetaLearnerConfig
    train_logloss: list[float] = field(default_factory=list)


def clamp_probability(p: float) -> float:
    """Clamp to [PROB_EPS, 1 - PROB_EPS] so logs and logits stay finite."""
    return min(max(p, PROB_EPS), 1.0 - PROB_EPS)


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _sigmoid_array(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def logistic_gradients(p: float, y: float) -> tuple[float, float]:
    """First and second derivatives of logloss at probability ``p``, target ``y``."""
    p = clamp_probability(p)
    return p - y, p * (1.0 - p)


def split_gain(
    g_left: float, h_left: float, g_right: float, h_right: float, l2: float = 0.0
) -> float:
    """Second-order gain of splitting a node into the given left/right halves."""
    g_total = g_left + g_right
    h_total = h_left + h_right
    return 0.5 * (
        g_left * g_left / (h_left + l2)
        + g_right * g_right / (h_right + l2)
        - g_total * g_total / (h_total + l2)
    )


def _logloss(raw: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(_sigmoid_array(raw), PROB_EPS, 1.0 - PROB_EPS)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


@dataclass(eq=False)
class _Candidate:
    gain: float
    feature: int
    threshold: float
    left_rows: np.ndarray
    right_rows: np.ndarray


@dataclass(eq=False)
class _Leaf:
    rows: np.ndarray
    node: TreeNode
    order: int
    best: "_Candidate | None"


def _best_split(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    features: np.ndarray,
    l2: float,
    min_data: int,
) -> _Candidate | None:
    """Exact best split of ``rows``; None when no split has positive gain.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values; both children must keep at least ``min_data`` rows. Ties break
    toward the lower feature index, then the lower threshold. Gains must
    clear ``GAIN_NOISE_REL`` times the parent score, which rejects
    true-zero gains inflated by cancellation noise.
    """
    m = len(rows)
    if m < 2 * min_data:
        return None
    g_rows = g[rows]
    h_rows = h[rows]
    g_total = float(g_rows.sum())
    h_total = float(h_rows.sum())
    parent_score = g_total * g_total / (h_total + l2)

    best_gain = GAIN_NOISE_REL * abs(parent_score)
    best_feature = -1
    best_cut = -1
    for f in features:
        x = X[rows, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        cuts = np.nonzero(xs[:-1] != xs[1:])[0]
        cuts = cuts[(cuts + 1 >= min_data) & (m - cuts - 1 >= min_data)]
        if len(cuts) == 0:
            continue
        g_cum = np.cumsum(g_rows[order])
        h_cum = np.cumsum(h_rows[order])
        g_left = g_cum[cuts]
        h_left = h_cum[cuts]
        g_right = g_total - g_left
        h_right = h_total - h_left
        gains = 0.5 * (
            g_left * g_left / (h_left + l2)
            + g_right * g_right / (h_right + l2)
            - parent_score
        )
        k = int(np.argmax(gains))
        if gains[k] > best_gain:
            best_gain = float(gains[k])
            best_feature = int(f)
            best_cut = int(cuts[k])
    if best_feature < 0:
        return None

    x = X[rows, best_feature]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    threshold = (xs[best_cut] + xs[best_cut + 1]) / 2.0
    rows_sorted = rows[order]
    return _Candidate(
        gain=best_gain,
        feature=best_feature,
        threshold=float(threshold),
        left_rows=rows_sorted[: best_cut + 1],
        right_rows=rows_sorted[best_cut + 1 :],
    )


def _grow_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    bag: np.ndarray,
    features: np.ndarray,
    config: MetaLearnerConfig,
) -> TreeNode | None:
    """Grow one tree leaf-wise; None when even the root has no positive-gain split."""
    l2 = config.l2_leaf_regularization
    root = TreeNode()
    first = _Leaf(
        rows=bag,
        node=root,
        order=0,
        best=_best_split(X, g, h, bag, features, l2, config.min_data_in_leaf),
    )
    if first.best is None:
        return None
    leaves = [first]
    next_order = 1
    while len(leaves) < config.num_leaves:
        splittable = [leaf for leaf in leaves if leaf.best is not None]
        if not splittable:
            break
        leaf = max(splittable, key=lambda lf: (lf.best.gain, -lf.order))
        cand = leaf.best
        leaf.node.feature_index = cand.feature
        leaf.node.threshold = cand.threshold
        leaf.node.left = TreeNode()
        leaf.node.right = TreeNode()
        leaves.remove(leaf)
        for rows, child in ((cand.left_rows, leaf.node.left), (cand.right_rows, leaf.node.right)):
            leaves.append(
                _Leaf(
                    rows=rows,
                    node=child,
                    order=next_order,
                    best=_best_split(X, g, h, rows, features, l2, config.min_data_in_leaf),
                )
            )
            next_order += 1
    for leaf in leaves:
        g_sum = float(g[leaf.rows].sum())
        h_sum = float(h[leaf.rows].sum())
        leaf.node.value = -g_sum / (h_sum + l2) * config.learning_rate
    return root


def _tree_values(tree: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    stack: list[tuple[TreeNode, np.ndarray]] = [(tree, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if node.is_leaf:
            out[idx] = node.value
            continue
        goes_left = X[idx, node.feature_index] <= node.threshold
        stack.append((node.left, idx[goes_left]))
        stack.append((node.right, idx[~goes_left]))
    return out


def gbdt_fit(
    features: Sequence[Sequence[float]] | np.ndarray,
    labels: Sequence[float] | np.ndarray,
    config: MetaLearnerConfig | None = None,
) -> BoostedTrees:
    """Fit boosted trees to binary labels with logistic loss.

    The base score is the clamped log-odds of the label base rate; each
    round fits one tree to the current gradients, skipping the round's
    tree entirely when no positive-gain root split exists (so a fit on
    constant labels predicts exactly the clamped base rate). Rows are
    re-bagged on rounds divisible by ``bagging_freq`` when
    ``bagging_fraction < 1``; a feature subset of size
    ``ceil(feature_fraction * n_features)`` is drawn every round when
    ``feature_fraction < 1``. ``train_logloss`` holds the full-data loss
    before boosting and after every round.
    """
    config = config or MetaLearnerConfig()
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"features must be 2-dimensional, got shape {X.shape}")
    if len(X) != len(y):
        raise ValueError(f"features ({len(X)}) and labels ({len(y)}) length mismatch")
    if len(X) == 0:
        raise ValueError("cannot fit on an empty dataset")
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise ValueError("labels must be 0 or 1")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")

    n, d = X.shape
    base_rate = clamp_probability(float(y.mean()))
    base_score = math.log(base_rate / (1.0 - base_rate))
    raw = np.full(n, base_score, dtype=np.float64)
    rng = np.random.default_rng(config.seed & _SEED_MASK)
    trees: list[TreeNode] = []
    losses = [_logloss(raw, y)]
    bag = np.arange(n)
    for round_index in range(config.num_rounds):
        if config.bagging_fraction < 1 and round_index % config.bagging_freq == 0:
            k = math.ceil(config.bagging_fraction * n)
            bag = np.sort(rng.choice(n, size=k, replace=False))
        if config.feature_fraction < 1:
            kf = math.ceil(config.feature_fraction * d)
            features_used = np.sort(rng.choice(d, size=kf, replace=False))
        else:
            features_used = np.arange(d)
        p = np.clip(_sigmoid_array(raw), PROB_EPS, 1.0 - PROB_EPS)
        g = p - y
        h = p * (1.0 - p)
        tree = _grow_tree(X, g, h, bag, features_used, config)
        if tree is not None:
            trees.append(tree)
            raw += _tree_values(tree, X)
        losses.append(_logloss(raw, y))
    return BoostedTrees(base_score=base_score, trees=trees, config=config, train_logloss=losses)


def gbdt_predict_raw(model: BoostedTrees, x: Sequence[float] | np.ndarray) -> float:
    """Raw additive score for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    raw = model.base_score
    for tree in model.trees:
        node = tree
        while not node.is_leaf:
            node = node.left if x[node.feature_index] <= node.threshold else node.right
        raw += node.value
    return raw


def gbdt_predict_proba(model: BoostedTrees, x: Sequence[float] | np.ndarray) -> float:
    """Predicted probability of the positive class for one feature vector."""
    return sigmoid(gbdt_predict_raw(model, x))


def gbdt_predict_proba_many(model: BoostedTrees, X: np.ndarray) -> np.ndarray:
    """Predicted positive-class probabilities for a feature matrix."""
    X = np.asarray(X, dtype=np.float64)
    raw = np.full(len(X), model.base_score, dtype=np.float64)
    for tree in model.trees:
        raw += _tree_values(tree, X)
    return _sigmoid_array(raw)
