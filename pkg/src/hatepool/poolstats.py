"""Pool-level annotation statistics by language, model, and ensemble strategy.

Summaries are computed from integer counts wherever possible; the pooled
All row recombines per-language means by count weighting, in sorted
language order, so it is exactly reproducible from the per-language rows.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Callable, Sequence

from .datasets import BinaryLabel
from .ensemble import ProbabilityVector, mean_label, model_votes, vote_label
from .meta import MetaLearnerModel, predict_meta

ALL_KEY = "All"

PoolRow = tuple  # (lang, ProbabilityVector) or (lang, ProbabilityVector, raw_label)


@dataclass
class PoolSummary:
    """Aggregate statistics for one annotated pool."""

    n_total: int
    languages: dict[str, int]
    per_model: dict[str, dict]
    per_strategy: dict[str, dict]
    raw_labels: dict[str, dict] | None = None

    def to_dict(self) -> dict:
        out = {
            "n_total": self.n_total,
            "languages": self.languages,
            "per_model": self.per_model,
            "per_strategy": self.per_strategy,
        }
        if self.raw_labels is not None:
            out["raw_labels"] = self.raw_labels
        return out


def _strategy_fn(
    name: str, model: MetaLearnerModel | None
) -> Callable[[ProbabilityVector], BinaryLabel]:
    if name == "vote":
        return vote_label
    if name == "mean":
        return mean_label
    if name == "lgb":
        if model is None:
            raise ValueError("strategy 'lgb' needs a trained meta-learner model")
        return lambda vector: predict_meta(model, vector)[0]
    raise ValueError(f"unknown ensemble strategy {name!r}")


def _unpack(row: PoolRow) -> tuple[str, ProbabilityVector, str | None]:
    if len(row) == 2:
        lang, vector = row
        return str(lang), vector, None
    if len(row) == 3:
        lang, vector, raw = row
        return str(lang), vector, None if raw is None else str(raw)
    raise ValueError(f"pool rows must have 2 or 3 fields, got {len(row)}")


def pool_statistics(
    pool: Sequence[PoolRow],
    strategies: Sequence[str] = ("vote", "mean"),
    model: MetaLearnerModel | None = None,
) -> PoolSummary:
    """Summarize an annotated pool.

    Pool rows are (language, vector) pairs, optionally extended with a raw
    source label as a third field; when any row carries one, a per-label
    breakdown over the labeled rows is included. All vectors must share
    one model set.
    """
    if not pool:
        raise ValueError("cannot summarize an empty pool")
    rows = [_unpack(r) for r in pool]
    model_ids = rows[0][1].model_ids
    for i, (_, vector, _) in enumerate(rows):
        if vector.model_ids != model_ids:
            raise ValueError(
                f"pool row {i} has model set {vector.model_ids}, expected {model_ids}"
            )
    langs = sorted({lang for lang, _, _ in rows})
    by_lang: dict[str, list[tuple[ProbabilityVector, str | None]]] = {lang: [] for lang in langs}
    for lang, vector, raw in rows:
        by_lang[lang].append((vector, raw))
    counts = {lang: len(by_lang[lang]) for lang in langs}
    n_total = len(rows)

    per_model: dict[str, dict] = {}
    for slot, model_id in enumerate(model_ids):
        mean_by_lang: dict[str, float] = {}
        hate_votes_by_lang: dict[str, int] = {}
        for lang in langs:
            vectors = [v for v, _ in by_lang[lang]]
            mean_by_lang[lang] = statistics.mean(v.entries[slot].p_hate for v in vectors)
            hate_votes_by_lang[lang] = sum(1 for v in vectors if model_votes(v)[slot])
        # The pooled mean recombines the per-language means by count so it
        # is exactly recomputable from this summary alone.
        pooled_mean = (
            sum(counts[lang] * mean_by_lang[lang] for lang in langs) / n_total
        )
        total_votes = sum(hate_votes_by_lang[lang] for lang in langs)
        per_model[model_id] = {
            "mean_p_hate": {**mean_by_lang, ALL_KEY: pooled_mean},
            "pct_hate": {
                **{lang: 100.0 * hate_votes_by_lang[lang] / counts[lang] for lang in langs},
                ALL_KEY: 100.0 * total_votes / n_total,
            },
        }

    per_strategy: dict[str, dict] = {}
    for name in strategies:
        label_fn = _strategy_fn(name, model)
        hate_by_lang = {
            lang: sum(1 for v, _ in by_lang[lang] if label_fn(v) is BinaryLabel.HATE)
            for lang in langs
        }
        total_hate = sum(hate_by_lang.values())
        per_strategy[name] = {
            "pct_hate": {
                **{lang: 100.0 * hate_by_lang[lang] / counts[lang] for lang in langs},
                ALL_KEY: 100.0 * total_hate / n_total,
            }
        }

    raw_summary: dict[str, dict] | None = None
    labeled = [(lang, raw) for lang, _, raw in rows if raw is not None]
    if labeled:
        labeled_by_lang: dict[str, int] = {}
        label_counts: dict[str, dict[str, int]] = {}
        for lang, raw in labeled:
            labeled_by_lang[lang] = labeled_by_lang.get(lang, 0) + 1
            label_counts.setdefault(raw, {})
            label_counts[raw][lang] = label_counts[raw].get(lang, 0) + 1
        n_labeled = len(labeled)
        raw_summary = {}
        for label in sorted(label_counts):
            per_lang = label_counts[label]
            total = sum(per_lang.values())
            lang_keys = sorted(labeled_by_lang)
            raw_summary[label] = {
                "count": {**{k: per_lang.get(k, 0) for k in lang_keys}, ALL_KEY: total},
                "pct": {
                    **{
                        k: 100.0 * per_lang.get(k, 0) / labeled_by_lang[k]
                        for k in lang_keys
                    },
                    ALL_KEY: 100.0 * total / n_labeled,
                },
            }

    return PoolSummary(
        n_total=n_total,
        languages=counts,
        per_model=per_model,
        per_strategy=per_strategy,
        raw_labels=raw_summary,
    )


def render_pool_table(summary: PoolSummary) -> str:
    """Fixed-width text rendering of a pool summary."""
    langs = sorted(summary.languages)
    columns = langs + [ALL_KEY]
    width = max(12, *(len(c) + 2 for c in columns))
    lines = []
    lines.append(f"{'':<28}" + "".join(f"{c:>{width}}" for c in columns))
    count_row = {**summary.languages, ALL_KEY: summary.n_total}
    lines.append(f"{'texts':<28}" + "".join(f"{count_row[c]:>{width}}" for c in columns))
    lines.append("")
    lines.append("mean hate probability")
    for model_id, entry in summary.per_model.items():
        cells = entry["mean_p_hate"]
        lines.append(f"{model_id:<28}" + "".join(f"{cells[c]:>{width}.4f}" for c in columns))
    lines.append("")
    lines.append("% predicted Hate (per model)")
    for model_id, entry in summary.per_model.items():
        cells = entry["pct_hate"]
        lines.append(f"{model_id:<28}" + "".join(f"{cells[c]:>{width}.2f}" for c in columns))
    lines.append("")
    lines.append("% predicted Hate (per strategy)")
    for name, entry in summary.per_strategy.items():
        cells = entry["pct_hate"]
        lines.append(f"{name:<28}" + "".join(f"{cells[c]:>{width}.2f}" for c in columns))
    if summary.raw_labels:
        lines.append("")
        lines.append("% by source label (labeled rows)")
        for label, entry in summary.raw_labels.items():
            cells = entry["pct"]
            lines.append(
                f"{label:<28}"
                + "".join(f"{cells.get(c, 0.0):>{width}.2f}" for c in columns)
            )
    return "\n".join(lines) + "\n"
