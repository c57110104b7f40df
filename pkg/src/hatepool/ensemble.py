"""Per-text ensemble decisions over four-model probability vectors.

Two closed-form strategies live here: majority vote over per-model hard
votes, and comparison of the two class-probability means. The learned
strategy is in :mod:`hatepool.meta`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .datasets import BinaryLabel
from .prompt import ModelProbability

ENSEMBLE_SIZE = 4

# A model votes Hate when its hate probability strictly exceeds one half;
# the ensemble says Hate when at least two of the four models do.
VOTE_THRESHOLD = 0.5
MIN_VOTES_FOR_HATE = 2


@dataclass(frozen=True)
class ProbabilityVector:
    """Class probabilities from all four models for one text.

    Entries are kept sorted by ``model_id`` so that feature layout and
    serialization order never depend on arrival order.
    """

    entries: tuple[ModelProbability, ...]

    def __post_init__(self) -> None:
        entries = tuple(sorted(self.entries, key=lambda e: e.model_id))
        object.__setattr__(self, "entries", entries)
        if len(entries) != ENSEMBLE_SIZE:
            raise ValueError(f"expected {ENSEMBLE_SIZE} model entries, got {len(entries)}")
        ids = [e.model_id for e in entries]
        if len(set(ids)) != ENSEMBLE_SIZE:
            raise ValueError(f"duplicate model ids: {ids}")

    @classmethod
    def from_mapping(cls, probs: Mapping[str, tuple[float, float]]) -> "ProbabilityVector":
        return cls(
            tuple(
                ModelProbability(model_id=mid, p_hate=ph, p_neutral=pn)
                for mid, (ph, pn) in probs.items()
            )
        )

    @property
    def model_ids(self) -> tuple[str, ...]:
        return tuple(e.model_id for e in self.entries)

    @property
    def p_hate(self) -> tuple[float, ...]:
        return tuple(e.p_hate for e in self.entries)

    @property
    def p_neutral(self) -> tuple[float, ...]:
        return tuple(e.p_neutral for e in self.entries)

    def features(self) -> np.ndarray:
        """Flatten to the 8-dimensional feature layout used by the meta-learner."""
        out = np.empty(2 * ENSEMBLE_SIZE, dtype=np.float64)
        for i, entry in enumerate(self.entries):
            out[2 * i] = entry.p_hate
            out[2 * i + 1] = entry.p_neutral
        return out

    def feature_names(self) -> tuple[str, ...]:
        names: list[str] = []
        for entry in self.entries:
            names.append(f"{entry.model_id}:p_hate")
            names.append(f"{entry.model_id}:p_neutral")
        return tuple(names)


def model_votes(vector: ProbabilityVector) -> tuple[bool, ...]:
    """Per-model hard votes, aligned with ``vector.entries``."""
    return tuple(e.p_hate > VOTE_THRESHOLD for e in vector.entries)


def vote_label(vector: ProbabilityVector) -> BinaryLabel:
    """Majority vote: Hate when at least two models vote Hate."""
    if sum(model_votes(vector)) >= MIN_VOTES_FOR_HATE:
        return BinaryLabel.HATE
    return BinaryLabel.NEUTRAL


def mean_label(vector: ProbabilityVector) -> BinaryLabel:
    """Compare the mean hate probability against the mean neutral probability.

    The comparison is done on exact rational sums, so the result is the
    true mathematical comparison of the two means; an exact tie goes to
    Neutral.
    """
    sum_hate = sum(Fraction(e.p_hate) for e in vector.entries)
    sum_neutral = sum(Fraction(e.p_neutral) for e in vector.entries)
    return BinaryLabel.HATE if sum_hate > sum_neutral else BinaryLabel.NEUTRAL


def mean_hate_score(vector: ProbabilityVector) -> float:
    """Mean hate probability (correctly rounded), usable as a ranking score."""
    total = sum(Fraction(e.p_hate) for e in vector.entries)
    return float(total / ENSEMBLE_SIZE)


def vote_hate_score(vector: ProbabilityVector) -> float:
    """Fraction of models voting Hate, usable as a ranking score."""
    return sum(model_votes(vector)) / ENSEMBLE_SIZE


def features_matrix(vectors: Sequence[ProbabilityVector]) -> np.ndarray:
    """Stack vectors into an (n, 8) feature matrix, checking a shared model set."""
    if not vectors:
        return np.empty((0, 2 * ENSEMBLE_SIZE), dtype=np.float64)
    ids = vectors[0].model_ids
    for i, v in enumerate(vectors):
        if v.model_ids != ids:
            raise ValueError(
                f"vector {i} has model set {v.model_ids}, expected {ids}"
            )
    return np.stack([v.features() for v in vectors])
