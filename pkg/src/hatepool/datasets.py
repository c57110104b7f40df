"""Benchmark dataset registry and binary label mapping.

Sixteen hate-speech benchmarks with heterogeneous label vocabularies are
described by a bundled registry file. Every raw label maps onto one of
two canonical classes, Hate or Neutral, via the per-dataset positive set.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

from ._jsonl import iter_jsonl, read_json_file


class BinaryLabel(str, Enum):
    HATE = "Hate"
    NEUTRAL = "Neutral"

    def __str__(self) -> str:  # keeps f-strings readable
        return self.value


class LabelMappingError(ValueError):
    """Raised when a raw label is not in the dataset's vocabulary."""


class UnknownDatasetError(KeyError):
    """Raised when a dataset name is not in the registry."""


@dataclass(frozen=True)
class DatasetSpec:
    """Registry entry for one benchmark dataset."""

    name: str
    language: str
    vocabulary: frozenset[str]
    positives: frozenset[str]
    text_column: str = "text"
    label_column: str = "label"
    id_column: str | None = None

    def __post_init__(self) -> None:
        if not self.vocabulary:
            raise ValueError(f"{self.name}: empty label vocabulary")
        if not self.positives:
            raise ValueError(f"{self.name}: empty positive label set")
        stray = self.positives - self.vocabulary
        if stray:
            raise ValueError(f"{self.name}: positives not in vocabulary: {sorted(stray)}")


@dataclass(frozen=True)
class LabeledExample:
    """One text with its canonical gold label."""

    id: str
    dataset: str
    text: str
    gold: BinaryLabel

    def to_dict(self) -> dict:
        return {"id": self.id, "dataset": self.dataset, "text": self.text, "gold": self.gold.value}

    @classmethod
    def from_dict(cls, row: Mapping) -> "LabeledExample":
        try:
            return cls(
                id=str(row["id"]),
                dataset=str(row["dataset"]),
                text=str(row["text"]),
                gold=BinaryLabel(row["gold"]),
            )
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed labeled example: {exc}") from exc


def _spec_from_dict(name: str, entry: Mapping) -> DatasetSpec:
    return DatasetSpec(
        name=name,
        language=str(entry["language"]),
        vocabulary=frozenset(str(v) for v in entry["vocabulary"]),
        positives=frozenset(str(v) for v in entry["positives"]),
        text_column=str(entry.get("text_column", "text")),
        label_column=str(entry.get("label_column", "label")),
        id_column=entry.get("id_column"),
    )


def load_registry(path: str | None = None) -> dict[str, DatasetSpec]:
    """Load the dataset registry; the bundled one when ``path`` is None."""
    if path is None:
        with resources.files("hatepool.data").joinpath("dataset_registry.json").open(
            "r", encoding="utf-8"
        ) as fp:
            raw = json.load(fp)
    else:
        raw = read_json_file(path)
    return {name: _spec_from_dict(name, entry) for name, entry in raw.items()}


def get_dataset_spec(name: str, registry: Mapping[str, DatasetSpec] | None = None) -> DatasetSpec:
    registry = registry if registry is not None else load_registry()
    try:
        return registry[name]
    except KeyError:
        raise UnknownDatasetError(
            f"unknown dataset {name!r}; registered: {', '.join(sorted(registry))}"
        ) from None


def canonical_raw_label(raw: object) -> str:
    """Normalize a raw label for vocabulary lookup (string, stripped, lowercased)."""
    return str(raw).strip().lower()


def map_label(spec: DatasetSpec, raw: object) -> BinaryLabel:
    """Map one raw dataset label onto the binary scheme.

    Lookup is case-insensitive against the registry vocabulary; anything
    outside the vocabulary raises :class:`LabelMappingError` naming both
    the dataset and the offending label.
    """
    label = canonical_raw_label(raw)
    if label not in spec.vocabulary:
        raise LabelMappingError(
            f"dataset {spec.name!r}: unmapped raw label {raw!r} "
            f"(vocabulary: {', '.join(sorted(spec.vocabulary))})"
        )
    return BinaryLabel.HATE if label in spec.positives else BinaryLabel.NEUTRAL


def dataset_stats(examples: Sequence[LabeledExample]) -> tuple[int, float]:
    """Return (count, fraction of Hate examples); empty input warns and yields (0, 0.0)."""
    count = len(examples)
    if count == 0:
        warnings.warn("dataset_stats over empty input", RuntimeWarning, stacklevel=2)
        return 0, 0.0
    hate = sum(1 for ex in examples if ex.gold is BinaryLabel.HATE)
    return count, hate / count


def ingest_rows(
    rows: Iterable[Mapping], spec: DatasetSpec, *, id_prefix: str | None = None
) -> Iterator[LabeledExample]:
    """Convert raw dataset rows into labeled examples.

    Rows must carry the registry entry's text and label columns; ids come
    from its id column when declared, otherwise a stable running index.
    """
    prefix = id_prefix if id_prefix is not None else spec.name
    for index, row in enumerate(rows):
        try:
            text = str(row[spec.text_column])
            raw_label = row[spec.label_column]
        except KeyError as exc:
            raise ValueError(f"dataset {spec.name!r}: row {index} missing column {exc}") from exc
        if spec.id_column is not None and spec.id_column in row:
            example_id = str(row[spec.id_column])
        else:
            example_id = f"{prefix}-{index:06d}"
        yield LabeledExample(
            id=example_id, dataset=spec.name, text=text, gold=map_label(spec, raw_label)
        )


def read_dataset_file(path: str, spec: DatasetSpec, fmt: str | None = None) -> Iterator[Mapping]:
    """Yield raw rows from a CSV/TSV/JSONL dataset export."""
    if fmt is None:
        lowered = path.lower()
        if lowered.endswith(".csv"):
            fmt = "csv"
        elif lowered.endswith(".tsv"):
            fmt = "tsv"
        else:
            fmt = "jsonl"
    if fmt in ("csv", "tsv"):
        with open(path, "r", encoding="utf-8", newline="") as fp:
            reader = csv.DictReader(fp, delimiter="\t" if fmt == "tsv" else ",")
            yield from reader
    elif fmt == "jsonl":
        with open(path, "r", encoding="utf-8") as fp:
            for row in iter_jsonl(fp):
                if not isinstance(row, dict):
                    raise ValueError(f"dataset {spec.name!r}: JSONL rows must be objects")
                yield row
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")


# Named training mixtures. Language mixtures are derived from the registry;
# the seven-dataset mixture is an explicit curated list.
SEVEN_SET = (
    "HateXplain",
    "Sexism",
    "Covid",
    "US_election",
    "GermEval21",
    "GermEval19",
    "ViHSD",
)

_LANGUAGE_CONFIGS = {"Eng": "eng", "Deu": "deu", "Spa": "spa", "Vie": "vie"}


@dataclass(frozen=True)
class TrainingConfig:
    """A named set of datasets used to supervise the meta-learner."""

    name: str
    members: tuple[str, ...]


def training_config_names() -> tuple[str, ...]:
    return tuple(_LANGUAGE_CONFIGS) + ("SevenSet", "SixteenMix")


def build_training_config(
    name: str, registry: Mapping[str, DatasetSpec] | None = None
) -> TrainingConfig:
    """Resolve a mixture name to its member datasets, in registry order."""
    registry = registry if registry is not None else load_registry()
    if name in _LANGUAGE_CONFIGS:
        lang = _LANGUAGE_CONFIGS[name]
        members = tuple(n for n in registry if registry[n].language == lang)
    elif name == "SevenSet":
        members = tuple(n for n in SEVEN_SET if n in registry)
        if len(members) != len(SEVEN_SET):
            missing = sorted(set(SEVEN_SET) - set(members))
            raise ValueError(f"SevenSet members missing from registry: {missing}")
    elif name == "SixteenMix":
        members = tuple(registry)
    else:
        raise UnknownDatasetError(
            f"unknown training config {name!r}; known: {', '.join(training_config_names())}"
        )
    if not members:
        raise ValueError(f"training config {name!r} selects no datasets")
    return TrainingConfig(name=name, members=members)
