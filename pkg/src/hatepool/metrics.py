"""Accuracy, macro-F1, pooled group scoring, and mean-probability thresholding.

Hate is the positive class throughout. Group scores are always recomputed
from the pooled per-text predictions of the member datasets, never by
averaging per-dataset scores.
"""

from __future__ import annotations

import statistics
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .datasets import BinaryLabel, DatasetSpec, load_registry


@dataclass(frozen=True)
class ConfusionCounts:
    """2x2 confusion counts with Hate as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self) -> None:
        for name, n in (("tp", self.tp), ("fp", self.fp), ("fn", self.fn), ("tn", self.tn)):
            if n < 0:
                raise ValueError(f"{name} must be nonnegative, got {n}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def confusion(
    predicted: Sequence[BinaryLabel], gold: Sequence[BinaryLabel]
) -> ConfusionCounts:
    if len(predicted) != len(gold):
        raise ValueError(f"predicted ({len(predicted)}) and gold ({len(gold)}) length mismatch")
    tp = fp = fn = tn = 0
    for p, g in zip(predicted, gold):
        if g is BinaryLabel.HATE:
            if p is BinaryLabel.HATE:
                tp += 1
            else:
                fn += 1
        else:
            if p is BinaryLabel.HATE:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def accuracy(counts: ConfusionCounts) -> float:
    if counts.total == 0:
        raise ValueError("accuracy undefined on empty counts")
    return (counts.tp + counts.tn) / counts.total


def f1_from_counts(tp: int, fp: int, fn: int) -> float:
    """F1 of one class; zero-denominator precision/recall/F1 score as 0."""
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def macro_f1(counts: ConfusionCounts) -> float:
    """Unweighted mean of the Hate-class and Neutral-class F1 scores."""
    f1_hate = f1_from_counts(counts.tp, counts.fp, counts.fn)
    f1_neutral = f1_from_counts(counts.tn, counts.fn, counts.fp)
    return (f1_hate + f1_neutral) / 2.0


def mean_probability_threshold(scores: Sequence[float]) -> float:
    """Mean of the scores, correctly rounded (so it never exceeds the max score)."""
    if len(scores) == 0:
        raise ValueError("threshold undefined on empty scores")
    return statistics.mean(scores)


def apply_threshold(scores: Sequence[float], threshold: float) -> list[BinaryLabel]:
    """Hate where score >= threshold; with the mean as threshold, at least one
    score always clears it."""
    return [
        BinaryLabel.HATE if score >= threshold else BinaryLabel.NEUTRAL for score in scores
    ]


@dataclass(frozen=True)
class GroupSpec:
    """A named pool of datasets scored jointly."""

    name: str
    members: frozenset[str]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError(f"group {self.name!r} has no members")


def default_groups(registry: Mapping[str, DatasetSpec] | None = None) -> list[GroupSpec]:
    """Language pools, the seven-dataset pool and its complement, and All."""
    from .datasets import SEVEN_SET

    registry = registry if registry is not None else load_registry()
    by_language: dict[str, set[str]] = {}
    for name, spec in registry.items():
        by_language.setdefault(spec.language, set()).add(name)
    language_names = {"eng": "EN", "deu": "DE", "spa": "ES", "vie": "VI"}
    groups = [
        GroupSpec(name=language_names.get(lang, lang.upper()), members=frozenset(members))
        for lang, members in sorted(by_language.items())
    ]
    seven = frozenset(n for n in SEVEN_SET if n in registry)
    if seven:
        groups.append(GroupSpec(name="SevenSet", members=seven))
        rest = frozenset(registry) - seven
        if rest:
            groups.append(GroupSpec(name="Rest", members=rest))
    groups.append(GroupSpec(name="All", members=frozenset(registry)))
    return groups


def pooled_group_scores(
    predictions: Sequence[tuple[str, BinaryLabel, BinaryLabel]],
    groups: Sequence[GroupSpec],
    known_datasets: Iterable[str] | None = None,
) -> dict[str, dict]:
    """Score each group on the pooled per-text predictions of its members.

    ``predictions`` rows are (dataset, predicted, gold). Rows tagged with a
    dataset outside ``known_datasets`` (when given) are an error; groups
    that match no rows are omitted with a warning.
    """
    if known_datasets is not None:
        known = set(known_datasets)
        for dataset, _, _ in predictions:
            if dataset not in known:
                raise ValueError(f"prediction row references unknown dataset {dataset!r}")
    by_dataset: dict[str, list[tuple[BinaryLabel, BinaryLabel]]] = {}
    for dataset, pred, gold in predictions:
        by_dataset.setdefault(dataset, []).append((pred, gold))

    out: dict[str, dict] = {}
    for group in groups:
        pooled = [pair for name in sorted(group.members) for pair in by_dataset.get(name, [])]
        if not pooled:
            warnings.warn(
                f"group {group.name!r} matched no predictions; skipped",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        counts = confusion([p for p, _ in pooled], [g for _, g in pooled])
        out[group.name] = {
            "n": counts.total,
            "accuracy": accuracy(counts),
            "macro_f1": macro_f1(counts),
            "confusion": counts.to_dict(),
        }
    return out


@dataclass
class PredictionRow:
    """One scored text: dataset tag, hate score, gold label."""

    id: str
    dataset: str
    score_hate: float
    gold: BinaryLabel

    @classmethod
    def from_dict(cls, row: Mapping) -> "PredictionRow":
        try:
            return cls(
                id=str(row["id"]),
                dataset=str(row["dataset"]),
                score_hate=float(row["score_hate"]),
                gold=BinaryLabel(row["gold"]),
            )
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed prediction row: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset,
            "score_hate": self.score_hate,
            "gold": self.gold.value,
        }


THRESHOLD_SCOPES = ("group", "dataset", "global")


@dataclass
class EvaluationReport:
    """Per-dataset and per-group scores under one thresholding policy."""

    threshold_mode: str
    threshold_scope: str
    threshold_global: float
    per_dataset: dict[str, dict] = field(default_factory=dict)
    per_group: dict[str, dict] = field(default_factory=dict)
    deltas: dict[str, dict] | None = None

    def to_dict(self) -> dict:
        out = {
            "threshold_mode": self.threshold_mode,
            "threshold_scope": self.threshold_scope,
            "threshold_global": self.threshold_global,
            "per_dataset": self.per_dataset,
            "per_group": self.per_group,
        }
        if self.deltas is not None:
            out["deltas"] = self.deltas
        return out


def _threshold_and_score(
    rows: Sequence[PredictionRow], threshold: float
) -> dict:
    scores = [r.score_hate for r in rows]
    predicted = apply_threshold(scores, threshold)
    counts = confusion(predicted, [r.gold for r in rows])
    return {
        "n": counts.total,
        "threshold": threshold,
        "accuracy": accuracy(counts),
        "macro_f1": macro_f1(counts),
        "confusion": counts.to_dict(),
    }


def build_report(
    rows: Sequence[PredictionRow],
    groups: Sequence[GroupSpec] | None = None,
    threshold_mode: str = "mean",
    threshold_scope: str = "group",
    fixed_threshold: float | None = None,
    known_datasets: Iterable[str] | None = None,
) -> EvaluationReport:
    """Threshold scores into labels and score every dataset and group.

    ``threshold_mode`` is ``mean`` (threshold at the mean hate score of the
    population being scored) or ``fixed`` (use ``fixed_threshold``).
    ``threshold_scope`` controls which population the mean is taken over:

    - ``group``: every reported unit (each dataset and each group) is
      thresholded at the mean score of its own pooled rows;
    - ``dataset``: labels are fixed once per dataset, and group scores
      pool those per-dataset labels;
    - ``global``: one mean over all rows everywhere.

    With ``fixed`` mode the scope is irrelevant.
    """
    if not rows:
        raise ValueError("cannot build a report from zero prediction rows")
    if threshold_mode not in ("mean", "fixed"):
        raise ValueError(f"unknown threshold mode {threshold_mode!r}")
    if threshold_scope not in THRESHOLD_SCOPES:
        raise ValueError(f"unknown threshold scope {threshold_scope!r}")
    if threshold_mode == "fixed" and fixed_threshold is None:
        raise ValueError("fixed threshold mode requires a threshold value")
    if known_datasets is not None:
        known = set(known_datasets)
        for row in rows:
            if row.dataset not in known:
                raise ValueError(f"prediction row references unknown dataset {row.dataset!r}")

    datasets_present = sorted({r.dataset for r in rows})
    if groups is None:
        groups = [GroupSpec(name="All", members=frozenset(datasets_present))]
    global_threshold = (
        fixed_threshold
        if threshold_mode == "fixed"
        else mean_probability_threshold([r.score_hate for r in rows])
    )

    by_dataset: dict[str, list[PredictionRow]] = {}
    for row in rows:
        by_dataset.setdefault(row.dataset, []).append(row)

    def unit_threshold(unit_rows: Sequence[PredictionRow]) -> float:
        if threshold_mode == "fixed":
            return fixed_threshold
        if threshold_scope == "global":
            return global_threshold
        return mean_probability_threshold([r.score_hate for r in unit_rows])

    per_dataset: dict[str, dict] = {}
    dataset_labels: dict[str, list[tuple[BinaryLabel, BinaryLabel]]] = {}
    for name in datasets_present:
        d_rows = by_dataset[name]
        t = unit_threshold(d_rows)
        per_dataset[name] = _threshold_and_score(d_rows, t)
        predicted = apply_threshold([r.score_hate for r in d_rows], t)
        dataset_labels[name] = list(zip(predicted, (r.gold for r in d_rows)))

    per_group: dict[str, dict] = {}
    for group in groups:
        members = sorted(n for n in group.members if n in by_dataset)
        if not members:
            warnings.warn(
                f"group {group.name!r} matched no predictions; skipped",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        if threshold_scope == "dataset" and threshold_mode == "mean":
            pooled = [pair for name in members for pair in dataset_labels[name]]
            counts = confusion([p for p, _ in pooled], [g for _, g in pooled])
            per_group[group.name] = {
                "n": counts.total,
                "threshold": None,
                "accuracy": accuracy(counts),
                "macro_f1": macro_f1(counts),
                "confusion": counts.to_dict(),
            }
        else:
            pooled_rows = [row for name in members for row in by_dataset[name]]
            t = unit_threshold(pooled_rows)
            per_group[group.name] = _threshold_and_score(pooled_rows, t)
    return EvaluationReport(
        threshold_mode=threshold_mode,
        threshold_scope=threshold_scope,
        threshold_global=global_threshold,
        per_dataset=per_dataset,
        per_group=per_group,
    )


def _flat_metric(report_dict: Mapping, metric: str) -> dict[str, float]:
    flat: dict[str, float] = {}
    for section in ("per_dataset", "per_group"):
        for name, entry in report_dict.get(section, {}).items():
            flat[f"{section}:{name}"] = entry[metric]
    return flat


def delta_report(
    report: Mapping, baseline: Mapping, metric: str = "macro_f1"
) -> dict[str, float]:
    """Per-unit ``report - baseline`` for one metric over the shared units.

    Units present on only one side are skipped with a warning; fully
    disjoint reports are an error.
    """
    current = _flat_metric(report, metric)
    base = _flat_metric(baseline, metric)
    shared = sorted(set(current) & set(base))
    missing = sorted(set(current) ^ set(base))
    if not shared:
        raise ValueError("report and baseline share no datasets or groups")
    for name in missing:
        warnings.warn(
            f"unit {name!r} present on only one side; skipped in deltas",
            RuntimeWarning,
            stacklevel=2,
        )
    return {name: current[name] - base[name] for name in shared}


def render_report_table(report: EvaluationReport) -> str:
    """Fixed-width text rendering of a report, datasets then groups."""
    lines = []
    header = f"{'unit':<24} {'n':>7} {'accuracy':>9} {'macro_f1':>9}"
    lines.append(header)
    lines.append("-" * len(header))
    for section, entries in (("dataset", report.per_dataset), ("group", report.per_group)):
        for name in sorted(entries):
            entry = entries[name]
            lines.append(
                f"{name:<24} {entry['n']:>7} {entry['accuracy']:>9.4f} {entry['macro_f1']:>9.4f}"
            )
        if entries:
            lines.append("")
    return "\n".join(lines).rstrip() + "\n"
