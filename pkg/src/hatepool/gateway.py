"""Concurrent fan-out of annotation prompts to four model endpoints.

Each endpoint gets its own worker pool capped at its ``max_in_flight``,
so one slow model never throttles the others. Requests use the
completions wire shape: one generated token with top-k logprobs, from
which the two label-token weights are read. Transient failures retry
with exponential backoff and jitter; texts that still fail on any
endpoint are quarantined instead of aborting the batch.
"""

from __future__ import annotations

import math
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, TextIO

import requests

from ._jsonl import iter_jsonl, write_jsonl_line
from .ensemble import ENSEMBLE_SIZE, ProbabilityVector
from .prompt import (
    ExtractionError,
    ModelProbability,
    PromptTemplate,
    extract_label_probabilities,
    render_prompt,
)


@dataclass(frozen=True)
class AnnotatorEndpoint:
    """One model endpoint and its transport limits.

    ``retry_limit`` is the number of retries after the first attempt;
    ``max_in_flight`` caps concurrent requests to this endpoint.
    """

    model_id: str
    base_url: str
    auth_token: str | None = None
    max_in_flight: int = 4
    timeout: float = 30.0
    retry_limit: int = 2
    backoff_base: float = 0.25
    logprobs_top_k: int = 20

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be nonempty")
        if not self.base_url:
            raise ValueError("base_url must be nonempty")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be at least 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be nonnegative")
        if self.backoff_base < 0:
            raise ValueError("backoff_base must be nonnegative")
        if self.logprobs_top_k < 1:
            raise ValueError("logprobs_top_k must be at least 1")

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "AnnotatorEndpoint":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown endpoint keys: {sorted(unknown)}")
        return cls(**dict(cfg))


class TransientRequestError(RuntimeError):
    """A failure worth retrying: transport error, non-200 status, bad payload."""


@dataclass
class AnnotationFailure:
    model_id: str
    attempts: int
    error: str


@dataclass
class QuarantinedText:
    """A text dropped from the batch, with the per-endpoint failures."""

    id: str
    failures: list[AnnotationFailure] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "errors": [
                {"model_id": f.model_id, "attempts": f.attempts, "error": f.error}
                for f in self.failures
            ],
        }


@dataclass
class AnnotationResult:
    """All four model probabilities for one text, plus the raw token weights seen."""

    id: str
    vector: ProbabilityVector
    raw_weights: dict[str, dict[str, float]]


def _completion_payload(endpoint: AnnotatorEndpoint, prompt: str) -> dict:
    return {
        "model": endpoint.model_id,
        "prompt": prompt,
        "max_tokens": 1,
        "logprobs": endpoint.logprobs_top_k,
    }


def _token_weights_from_response(body: Mapping) -> dict[str, float]:
    try:
        top = body["choices"][0]["logprobs"]["top_logprobs"][0]
    except (KeyError, IndexError, TypeError) as exc:
        raise TransientRequestError(f"malformed completion response: {exc!r}") from exc
    if not isinstance(top, Mapping):
        raise TransientRequestError("top_logprobs entry is not an object")
    return {str(token): math.exp(float(lp)) for token, lp in top.items()}


def _query_endpoint(
    session: requests.Session,
    endpoint: AnnotatorEndpoint,
    prompt: str,
) -> dict[str, float]:
    headers = {}
    if endpoint.auth_token:
        headers["Authorization"] = f"Bearer {endpoint.auth_token}"
    try:
        response = session.post(
            endpoint.base_url,
            json=_completion_payload(endpoint, prompt),
            headers=headers,
            timeout=endpoint.timeout,
        )
    except requests.RequestException as exc:
        raise TransientRequestError(f"request failed: {exc}") from exc
    if response.status_code != 200:
        raise TransientRequestError(f"HTTP {response.status_code}")
    try:
        body = response.json()
    except ValueError as exc:
        raise TransientRequestError(f"response is not JSON: {exc}") from exc
    return _token_weights_from_response(body)


def _annotate_one(
    local: threading.local,
    endpoint: AnnotatorEndpoint,
    template: PromptTemplate,
    text_id: str,
    prompt: str,
    rng: random.Random,
    sleep=time.sleep,
) -> tuple[ModelProbability, dict[str, float]]:
    """One text on one endpoint, with retries. Raises AnnotationError on give-up."""
    if not hasattr(local, "session"):
        local.session = requests.Session()
    attempts = endpoint.retry_limit + 1
    last_error = "unknown"
    for attempt in range(attempts):
        try:
            weights = _query_endpoint(local.session, endpoint, prompt)
            probability = extract_label_probabilities(
                weights, template, model_id=endpoint.model_id, text_id=text_id
            )
        except TransientRequestError as exc:
            last_error = str(exc)
            if attempt + 1 < attempts:
                delay = endpoint.backoff_base * (2.0 ** attempt)
                sleep(delay * (0.5 + rng.random()))
            continue
        except ExtractionError as exc:
            # A well-formed response without label tokens will not improve
            # on retry; fail the text on this endpoint immediately.
            raise AnnotationError(endpoint.model_id, attempt + 1, str(exc)) from exc
        label_tokens = (*template.hate_tokens, *template.neutral_tokens)
        raw = {tok: weights[tok] for tok in label_tokens if tok in weights}
        return probability, raw
    raise AnnotationError(endpoint.model_id, attempts, last_error)


class AnnotationError(RuntimeError):
    def __init__(self, model_id: str, attempts: int, message: str) -> None:
        super().__init__(f"{model_id}: {message} (after {attempts} attempts)")
        self.model_id = model_id
        self.attempts = attempts
        self.message = message


def annotate_batch(
    texts: Sequence[tuple[str, str]],
    endpoints: Sequence[AnnotatorEndpoint],
    template: PromptTemplate | None = None,
    seed: int = 0,
    sleep=time.sleep,
) -> tuple[list[AnnotationResult], list[QuarantinedText]]:
    """Annotate (id, text) pairs on all four endpoints.

    Results and quarantined texts each come back in input order; a text
    lands in exactly one of the two lists. Rendering the prompt happens
    once per text and is shared across endpoints.
    """
    template = template or PromptTemplate()
    if len(endpoints) != ENSEMBLE_SIZE:
        raise ValueError(f"expected {ENSEMBLE_SIZE} endpoints, got {len(endpoints)}")
    ids = [ep.model_id for ep in endpoints]
    if len(set(ids)) != ENSEMBLE_SIZE:
        raise ValueError(f"duplicate endpoint model ids: {ids}")
    seen_text_ids = set()
    for text_id, _ in texts:
        if text_id in seen_text_ids:
            raise ValueError(f"duplicate text id {text_id!r}")
        seen_text_ids.add(text_id)

    ordered = sorted(endpoints, key=lambda ep: ep.model_id)
    prompts = [render_prompt(template, text) for _, text in texts]

    executors = {
        ep.model_id: ThreadPoolExecutor(
            max_workers=ep.max_in_flight, thread_name_prefix=f"annotate-{ep.model_id}"
        )
        for ep in ordered
    }
    locals_by_model = {ep.model_id: threading.local() for ep in ordered}
    rng = random.Random(seed)
    rngs = {ep.model_id: random.Random(rng.getrandbits(64)) for ep in ordered}
    results: list[AnnotationResult] = []
    quarantined: list[QuarantinedText] = []
    try:
        futures = {}
        for index, (text_id, _) in enumerate(texts):
            for ep in ordered:
                futures[(index, ep.model_id)] = executors[ep.model_id].submit(
                    _annotate_one,
                    locals_by_model[ep.model_id],
                    ep,
                    template,
                    text_id,
                    prompts[index],
                    rngs[ep.model_id],
                    sleep,
                )
        for index, (text_id, _) in enumerate(texts):
            probabilities: list[ModelProbability] = []
            raw_weights: dict[str, dict[str, float]] = {}
            failures: list[AnnotationFailure] = []
            for ep in ordered:
                try:
                    probability, raw = futures[(index, ep.model_id)].result()
                except AnnotationError as exc:
                    failures.append(
                        AnnotationFailure(
                            model_id=exc.model_id, attempts=exc.attempts, error=exc.message
                        )
                    )
                    continue
                probabilities.append(probability)
                raw_weights[ep.model_id] = raw
            if failures:
                quarantined.append(QuarantinedText(id=text_id, failures=failures))
            else:
                results.append(
                    AnnotationResult(
                        id=text_id,
                        vector=ProbabilityVector(tuple(probabilities)),
                        raw_weights=raw_weights,
                    )
                )
    finally:
        for executor in executors.values():
            executor.shutdown(wait=True)
    return results, quarantined


# --- annotation JSONL wire format ------------------------------------------
#
# First line: {"model_order": [...]}  (sorted model ids)
# Then one row per text:
#   {"id": ..., "lang": ..., "models": {model_id: {"hate": h, "neutral": n,
#    "raw": {token: weight, ...}}}, ...optional "raw_label"}


@dataclass
class AnnotationRow:
    """One decoded annotation row."""

    id: str
    lang: str | None
    vector: ProbabilityVector
    raw_weights: dict[str, dict[str, float]]
    raw_label: str | None = None


def write_annotations(
    fp: TextIO,
    results: Sequence[AnnotationResult],
    lang_by_id: Mapping[str, str] | None = None,
    raw_label_by_id: Mapping[str, str] | None = None,
    model_order: Sequence[str] | None = None,
) -> None:
    if model_order is None:
        if not results:
            raise ValueError("no annotation results and no explicit model order")
        model_order = list(results[0].vector.model_ids)
    else:
        model_order = list(model_order)
    write_jsonl_line(fp, {"model_order": model_order})
    for result in results:
        if list(result.vector.model_ids) != model_order:
            raise ValueError(f"result {result.id!r} has a different model set")
        row: dict = {
            "id": result.id,
            "models": {
                entry.model_id: {
                    "hate": entry.p_hate,
                    "neutral": entry.p_neutral,
                    "raw": result.raw_weights.get(entry.model_id, {}),
                }
                for entry in result.vector.entries
            },
        }
        if lang_by_id is not None:
            row["lang"] = lang_by_id.get(result.id)
        if raw_label_by_id is not None and result.id in raw_label_by_id:
            row["raw_label"] = raw_label_by_id[result.id]
        write_jsonl_line(fp, row)


def read_annotations(fp: TextIO) -> tuple[list[str], Iterator[AnnotationRow]]:
    """Read the header and return (model_order, row iterator)."""
    stream = iter_jsonl(fp)
    try:
        header = next(stream)
    except StopIteration:
        raise ValueError("annotation file is empty") from None
    if not isinstance(header, dict) or "model_order" not in header:
        raise ValueError("annotation file must start with a model_order header line")
    model_order = [str(m) for m in header["model_order"]]
    expected = tuple(sorted(model_order))

    def rows() -> Iterator[AnnotationRow]:
        for row in stream:
            if not isinstance(row, dict) or "id" not in row or "models" not in row:
                raise ValueError(f"malformed annotation row: {row!r}")
            models = row["models"]
            if tuple(sorted(models)) != expected:
                raise ValueError(
                    f"row {row['id']!r} model set {sorted(models)} does not match header"
                )
            entries = tuple(
                ModelProbability(
                    model_id=mid,
                    p_hate=float(models[mid]["hate"]),
                    p_neutral=float(models[mid]["neutral"]),
                )
                for mid in expected
            )
            raw = {mid: dict(models[mid].get("raw", {})) for mid in expected}
            raw_label = row.get("raw_label")
            yield AnnotationRow(
                id=str(row["id"]),
                lang=row.get("lang"),
                vector=ProbabilityVector(entries),
                raw_weights=raw,
                raw_label=None if raw_label is None else str(raw_label),
            )

    return model_order, rows()
