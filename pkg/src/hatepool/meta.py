"""Two-head boosted-tree meta-learner over four-model probability features.

One booster is fit per class (Hate and Neutral) on the same 8-dimensional
features with the same hyperparameters and seed; prediction compares the
two sigmoid head scores, breaking exact ties toward Neutral.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._jsonl import read_json_file, write_json_file
from .datasets import BinaryLabel
from .ensemble import ProbabilityVector, features_matrix
from .gbdt import (
    BoostedTrees,
    MetaLearnerConfig,
    TreeNode,
    gbdt_fit,
    gbdt_predict_proba,
    gbdt_predict_proba_many,
)

FEATURE_COUNT = 8

HEAD_NAMES = ("hate", "neutral")


class SingleClassError(ValueError):
    """Raised when the supervision contains only one class."""


@dataclass
class MetaLearnerModel:
    """Fitted pair of boosters plus the feature layout they were trained on."""

    hate_head: BoostedTrees
    neutral_head: BoostedTrees
    config: MetaLearnerConfig
    feature_order: tuple[str, ...]


def train_meta(
    features: np.ndarray,
    golds: Sequence[BinaryLabel],
    config: MetaLearnerConfig | None = None,
    feature_order: Sequence[str] | None = None,
) -> MetaLearnerModel:
    """Fit both heads on (n, 8) features and canonical gold labels.

    ``golds`` must contain both classes; single-class supervision makes the
    comparison of heads meaningless and is refused.
    """
    config = config or MetaLearnerConfig()
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != FEATURE_COUNT:
        raise ValueError(f"expected features of shape (n, {FEATURE_COUNT}), got {X.shape}")
    if len(X) != len(golds):
        raise ValueError(f"features ({len(X)}) and golds ({len(golds)}) length mismatch")
    y_hate = np.array([1.0 if g is BinaryLabel.HATE else 0.0 for g in golds])
    if len(y_hate) == 0:
        raise ValueError("cannot train on an empty dataset")
    if y_hate.min() == y_hate.max():
        only = BinaryLabel.HATE if y_hate[0] == 1.0 else BinaryLabel.NEUTRAL
        raise SingleClassError(
            f"meta-learner training requires both classes; got only {only.value!r} "
            f"in {len(y_hate)} examples"
        )
    if feature_order is None:
        order = tuple(f"f{i}" for i in range(FEATURE_COUNT))
    else:
        order = tuple(feature_order)
        if len(order) != FEATURE_COUNT:
            raise ValueError(f"feature_order must name {FEATURE_COUNT} features, got {len(order)}")
    hate_head = gbdt_fit(X, y_hate, config)
    neutral_head = gbdt_fit(X, 1.0 - y_hate, config)
    return MetaLearnerModel(
        hate_head=hate_head, neutral_head=neutral_head, config=config, feature_order=order
    )


def train_meta_on_vectors(
    vectors: Sequence[ProbabilityVector],
    golds: Sequence[BinaryLabel],
    config: MetaLearnerConfig | None = None,
) -> MetaLearnerModel:
    X = features_matrix(vectors)
    order = vectors[0].feature_names() if vectors else None
    return train_meta(X, golds, config=config, feature_order=order)


def predict_meta(
    model: MetaLearnerModel, vector: ProbabilityVector
) -> tuple[BinaryLabel, float, float]:
    """Label one probability vector; returns (label, hate score, neutral score)."""
    x = vector.features()
    return predict_meta_features(model, x)


def predict_meta_features(
    model: MetaLearnerModel, x: np.ndarray
) -> tuple[BinaryLabel, float, float]:
    score_hate = gbdt_predict_proba(model.hate_head, x)
    score_neutral = gbdt_predict_proba(model.neutral_head, x)
    label = BinaryLabel.HATE if score_hate > score_neutral else BinaryLabel.NEUTRAL
    return label, score_hate, score_neutral


def predict_meta_many(model: MetaLearnerModel, X: np.ndarray) -> tuple[list[BinaryLabel], np.ndarray, np.ndarray]:
    """Vectorized :func:`predict_meta_features` over a feature matrix."""
    scores_hate = gbdt_predict_proba_many(model.hate_head, X)
    scores_neutral = gbdt_predict_proba_many(model.neutral_head, X)
    labels = [
        BinaryLabel.HATE if sh > sn else BinaryLabel.NEUTRAL
        for sh, sn in zip(scores_hate, scores_neutral)
    ]
    return labels, scores_hate, scores_neutral


def model_to_dict(model: MetaLearnerModel) -> dict:
    return {
        "config": model.config.to_dict(),
        "feature_order": list(model.feature_order),
        "heads": list(HEAD_NAMES),
        "base_scores": [model.hate_head.base_score, model.neutral_head.base_score],
        "trees": [
            [tree.to_dict() for tree in model.hate_head.trees],
            [tree.to_dict() for tree in model.neutral_head.trees],
        ],
    }


def model_from_dict(payload: dict) -> MetaLearnerModel:
    config = MetaLearnerConfig.from_dict(payload["config"])
    heads = payload.get("heads", list(HEAD_NAMES))
    if list(heads) != list(HEAD_NAMES):
        raise ValueError(f"unexpected head layout {heads!r}")
    base_scores = payload["base_scores"]
    tree_lists = payload["trees"]
    if len(base_scores) != 2 or len(tree_lists) != 2:
        raise ValueError("model file must carry exactly two heads")
    hate_head = BoostedTrees(
        base_score=float(base_scores[0]),
        trees=[TreeNode.from_dict(t) for t in tree_lists[0]],
        config=config,
    )
    neutral_head = BoostedTrees(
        base_score=float(base_scores[1]),
        trees=[TreeNode.from_dict(t) for t in tree_lists[1]],
        config=config,
    )
    return MetaLearnerModel(
        hate_head=hate_head,
        neutral_head=neutral_head,
        config=config,
        feature_order=tuple(payload["feature_order"]),
    )


def save_model(model: MetaLearnerModel, path: str) -> None:
    """Write the model as indented sorted-key JSON (stable bytes for a fixed model)."""
    write_json_file(path, model_to_dict(model))


def load_model(path: str) -> MetaLearnerModel:
    return model_from_dict(read_json_file(path))
