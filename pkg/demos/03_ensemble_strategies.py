# Turning four model opinions into one label.
#
# Vote: Hate when at least two models put p_hate above 0.5.
# Mean: Hate when the average p_hate beats the average p_neutral,
#       ties going to Neutral.
# The two strategies disagree exactly when a strong minority shouts
# louder than a lukewarm majority.

from hatepool import ModelProbability, ProbabilityVector, mean_hate_score, mean_label, vote_hate_score, vote_label

MODELS = ("Gemma2-9B", "Llama3.1-8B", "Mistral-7B", "Qwen2.5-14B")


def vector(*p_hates):
    return ProbabilityVector(
        tuple(
            ModelProbability(model_id=m, p_hate=p, p_neutral=1.0 - p)
            for m, p in zip(MODELS, p_hates)
        )
    )


cases = [
    ("unanimous hate", vector(0.9, 0.8, 0.7, 0.95)),
    ("unanimous neutral", vector(0.1, 0.2, 0.05, 0.3)),
    ("loud minority", vector(0.99, 0.98, 0.1, 0.2)),
    ("lukewarm majority", vector(0.55, 0.52, 0.51, 0.05)),
    ("exact mean tie", vector(0.9, 0.2, 0.6, 0.3)),
    ("0.5 is not a vote", vector(0.5, 0.5, 0.5, 0.5)),
]

print(f"{'case':20} {'p_hate values':28} {'vote':8} {'mean':8} {'vote score':>10} {'mean score':>10}")
for name, v in cases:
    ps = " ".join(f"{e.p_hate:.2f}" for e in v.entries)
    print(
        f"{name:20} {ps:28} {vote_label(v).value:8} {mean_label(v).value:8}"
        f" {vote_hate_score(v):>10.2f} {mean_hate_score(v):>10.4f}"
    )

# The eight-dimensional feature layout feeds the boosted-tree combiner.
v = cases[2][1]
print("\nfeature vector for the loud-minority case:")
for name, value in zip(v.feature_names(), v.features()):
    print(f"  {name:24} {value:.4f}")
