# Training the boosted-tree combiner on annotated examples.
#
# The meta-learner is two gradient-boosted tree heads over the
# eight-dimensional probability vectors: one scores Hate, one scores
# Neutral, and the larger sigmoid wins. Training is deterministic for a
# fixed seed, so a saved model reloads byte-identically.

import tempfile
from pathlib import Path

import numpy as np

from hatepool import (
    BinaryLabel,
    MetaLearnerConfig,
    ModelProbability,
    ProbabilityVector,
    load_model,
    mean_label,
    predict_meta,
    save_model,
    train_meta_on_vectors,
    vote_label,
)

MODELS = ("Gemma2-9B", "Llama3.1-8B", "Mistral-7B", "Qwen2.5-14B")
rng = np.random.default_rng(4)


def vector(p_hates):
    return ProbabilityVector(
        tuple(
            ModelProbability(model_id=m, p_hate=float(p), p_neutral=float(1.0 - p))
            for m, p in zip(MODELS, p_hates)
        )
    )


# Synthetic pool: hateful rows push three models up, neutral rows stay
# low, and one model is noisy either way so the trees have work to do.
vectors, golds = [], []
for i in range(400):
    hateful = i % 3 == 0
    base = 0.65 + 0.3 * rng.random(4) if hateful else 0.35 * rng.random(4)
    base[3] = rng.random()  # the noisy annotator
    vectors.append(vector(np.clip(base, 0.0, 1.0)))
    golds.append(BinaryLabel.HATE if hateful else BinaryLabel.NEUTRAL)

config = MetaLearnerConfig(num_rounds=40, num_leaves=8, min_data_in_leaf=10, seed=1)
model = train_meta_on_vectors(vectors, golds, config)

trace = model.hate_head.train_logloss
print(f"hate head: {len(model.hate_head.trees)} trees, logloss {trace[0]:.4f} -> {trace[-1]:.4f}")
trace = model.neutral_head.train_logloss
print(f"neutral head: {len(model.neutral_head.trees)} trees, logloss {trace[0]:.4f} -> {trace[-1]:.4f}")

hits = sum(1 for v, g in zip(vectors, golds) if predict_meta(model, v)[0] is g)
print(f"training accuracy: {hits / len(golds):.3f}")

# Where the trees overrule the simple strategies: the noisy annotator
# can drag the mean across 0.5, but the combiner learned to discount it.
disagreements = 0
for v, g in zip(vectors, golds):
    lgb = predict_meta(model, v)[0]
    if lgb is g and (vote_label(v) is not g or mean_label(v) is not g):
        disagreements += 1
print(f"rows rescued from a wrong vote/mean call: {disagreements}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "model.json"
    save_model(model, str(path))
    print(f"\nsaved model: {path.stat().st_size} bytes")
    reloaded = load_model(str(path))
    same = all(
        predict_meta(model, v) == predict_meta(reloaded, v) for v in vectors[:50]
    )
    print(f"reloaded model predicts identically: {same}")
