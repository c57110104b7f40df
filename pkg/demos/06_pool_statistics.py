# Summarizing an annotated pool by language, model, and strategy.
#
# The summary reports how often each model and each ensemble strategy
# calls Hate, per language and pooled. The pooled All column recombines
# the per-language means by count weighting, so it can be recomputed
# exactly from the table itself.

import numpy as np

from hatepool import ModelProbability, ProbabilityVector, pool_statistics, render_pool_table

MODELS = ("Gemma2-9B", "Llama3.1-8B", "Mistral-7B", "Qwen2.5-14B")
rng = np.random.default_rng(6)

# Hate is rare and its prevalence differs by language; one model is
# systematically more trigger-happy than the rest.
pool = []
for lang, n, hate_rate in (("eng", 300, 0.06), ("deu", 200, 0.04), ("spa", 120, 0.03), ("vie", 80, 0.08)):
    for _ in range(n):
        hateful = rng.random() < hate_rate
        p = 0.6 + 0.35 * rng.random(4) if hateful else 0.3 * rng.random(4)
        p[1] = min(1.0, p[1] + 0.15)  # the trigger-happy annotator
        vector = ProbabilityVector(
            tuple(
                ModelProbability(model_id=m, p_hate=float(v), p_neutral=float(1.0 - v))
                for m, v in zip(MODELS, p)
            )
        )
        raw = "offensive" if hateful else "normal"
        pool.append((lang, vector, raw))

summary = pool_statistics(pool, strategies=("vote", "mean"))
print(render_pool_table(summary))

entry = summary.per_model["Llama3.1-8B"]
langs = sorted(summary.languages)
recombined = sum(summary.languages[l] * entry["mean_p_hate"][l] for l in langs) / summary.n_total
print("the All column is exactly the count-weighted language mean:")
print(f"  reported  {entry['mean_p_hate']['All']!r}")
print(f"  recombined {recombined!r}")
