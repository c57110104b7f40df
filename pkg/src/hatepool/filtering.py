"""Stream filtering of web-index records down to conversational content.

A record survives when its URL path contains one of the configured
conversation keywords and the page declares a whitelisted schema.org
type. Optional per-language reservoir subsampling then trims the
surviving stream to fixed quotas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence
from urllib.parse import unquote, urlparse

import numpy as np

DEFAULT_URL_KEYWORDS = (
    "thread",
    "forum",
    "reply",
    "post",
    "status update",
    "quote",
)

# Conversational schema.org types, accepted as bare names or prefixed with
# http://schema.org/ or https://schema.org/.
DEFAULT_SCHEMA_WHITELIST = frozenset(
    {
        "DiscussionForumPosting",
        "SocialMediaPosting",
        "BlogPosting",
        "Article",
        "Comment",
        "UserComments",
        "QAPage",
        "Question",
        "Review",
        "Blog",
    }
)

_SCHEMA_PREFIXES = ("https://schema.org/", "http://schema.org/")

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


class UrlParseError(ValueError):
    """Raised when a record URL is not an absolute parseable URL."""


@dataclass(frozen=True)
class WebRecord:
    """One exported web-index record."""

    id: str
    url: str
    lang: str
    schema_types: tuple[str, ...]
    text: str

    @classmethod
    def from_dict(cls, row: Mapping) -> "WebRecord":
        try:
            return cls(
                id=str(row["id"]),
                url=str(row["url"]),
                lang=str(row["lang"]),
                schema_types=tuple(str(t) for t in row["schema_types"]),
                text=str(row["text"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed web record: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "url": self.url,
            "lang": self.lang,
            "schema_types": list(self.schema_types),
            "text": self.text,
        }


@dataclass(frozen=True)
class FilterConfig:
    """Keyword and schema-type criteria for :func:`filter_records`.

    ``expand_multiword_keywords`` also matches hyphen/underscore spellings
    of keywords that contain spaces ("status update" additionally matches
    "status-update" and "status_update"). Disable it to require the exact
    spelling only.
    """

    url_keywords: tuple[str, ...] = DEFAULT_URL_KEYWORDS
    schema_whitelist: frozenset[str] = DEFAULT_SCHEMA_WHITELIST
    expand_multiword_keywords: bool = True

    def __post_init__(self) -> None:
        if not self.url_keywords:
            raise ValueError("url_keywords must be nonempty")
        if not self.schema_whitelist:
            raise ValueError("schema_whitelist must be nonempty")
        for kw in self.url_keywords:
            if not kw:
                raise ValueError("url keywords must be nonempty strings")
            if kw != kw.lower():
                raise ValueError(f"url keywords must be lowercase: {kw!r}")

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "FilterConfig":
        kwargs: dict = {}
        if "url_keywords" in cfg:
            kwargs["url_keywords"] = tuple(cfg["url_keywords"])
        if "schema_whitelist" in cfg:
            kwargs["schema_whitelist"] = frozenset(cfg["schema_whitelist"])
        if "expand_multiword_keywords" in cfg:
            kwargs["expand_multiword_keywords"] = bool(cfg["expand_multiword_keywords"])
        return cls(**kwargs)


@dataclass
class FilterStats:
    """Counters accumulated by one :func:`filter_records` pass.

    ``records_seen == kept + dropped_url + dropped_schema`` always holds;
    records whose URL cannot be parsed count toward ``dropped_url`` and
    are additionally tallied in ``parse_failures``.
    """

    records_seen: int = 0
    kept: int = 0
    dropped_url: int = 0
    dropped_schema: int = 0
    parse_failures: int = 0
    kept_by_language: dict[str, int] = field(default_factory=dict)

    def merge(self, other: "FilterStats") -> "FilterStats":
        """Combine counters from a second pass (for sharded runs)."""
        merged_langs = dict(self.kept_by_language)
        for lang, n in other.kept_by_language.items():
            merged_langs[lang] = merged_langs.get(lang, 0) + n
        return FilterStats(
            records_seen=self.records_seen + other.records_seen,
            kept=self.kept + other.kept,
            dropped_url=self.dropped_url + other.dropped_url,
            dropped_schema=self.dropped_schema + other.dropped_schema,
            parse_failures=self.parse_failures + other.parse_failures,
            kept_by_language=merged_langs,
        )

    def to_dict(self) -> dict:
        return {
            "records_seen": self.records_seen,
            "kept": self.kept,
            "dropped_url": self.dropped_url,
            "dropped_schema": self.dropped_schema,
            "parse_failures": self.parse_failures,
            "kept_by_language": dict(sorted(self.kept_by_language.items())),
        }


def normalize_url_path(url: str) -> str:
    """Return the percent-decoded, lowercased path component of ``url``.

    Decoding happens before lowercasing so that percent-encoded letters
    ("%46orum") land in the same form as literal ones. Query strings and
    fragments are not part of the returned path.
    """
    try:
        parsed = urlparse(url)
    except ValueError as exc:
        raise UrlParseError(f"unparseable URL: {url!r}") from exc
    if not parsed.scheme or not parsed.netloc:
        raise UrlParseError(f"not an absolute URL: {url!r}")
    return unquote(parsed.path).lower()


def _keyword_variants(keyword: str, expand: bool) -> tuple[str, ...]:
    if expand and " " in keyword:
        return (keyword, keyword.replace(" ", "-"), keyword.replace(" ", "_"))
    return (keyword,)


def url_keyword_match(url: str, config: FilterConfig | None = None) -> bool:
    """True when the URL path contains any configured keyword as a substring."""
    config = config or FilterConfig()
    path = normalize_url_path(url)
    for keyword in config.url_keywords:
        for variant in _keyword_variants(keyword, config.expand_multiword_keywords):
            if variant in path:
                return True
    return False


def schema_type_match(schema_types: Iterable[str], config: FilterConfig | None = None) -> bool:
    """True when any declared type is whitelisted (bare or schema.org-prefixed).

    Type names are compared case-sensitively.
    """
    config = config or FilterConfig()
    for declared in schema_types:
        name = declared
        for prefix in _SCHEMA_PREFIXES:
            if declared.startswith(prefix):
                name = declared[len(prefix):]
                break
        if name in config.schema_whitelist:
            return True
    return False


def filter_records(
    records: Iterable[WebRecord], config: FilterConfig | None = None
) -> tuple[Iterator[WebRecord], FilterStats]:
    """Lazily filter ``records``, updating the returned stats as you consume.

    The URL criterion is checked first, so a record failing both counts
    only as ``dropped_url``. The stats object is complete once the
    iterator is exhausted.
    """
    config = config or FilterConfig()
    stats = FilterStats()

    def generate() -> Iterator[WebRecord]:
        for record in records:
            stats.records_seen += 1
            try:
                url_ok = url_keyword_match(record.url, config)
            except UrlParseError:
                stats.dropped_url += 1
                stats.parse_failures += 1
                continue
            if not url_ok:
                stats.dropped_url += 1
                continue
            if not schema_type_match(record.schema_types, config):
                stats.dropped_schema += 1
                continue
            stats.kept += 1
            stats.kept_by_language[record.lang] = stats.kept_by_language.get(record.lang, 0) + 1
            yield record

    return generate(), stats


def language_rng(seed: int, lang: str) -> np.random.Generator:
    """Per-language generator: independent streams, stable across runs."""
    lang_key = int.from_bytes(lang.encode("utf-8"), "big") if lang else 0
    return np.random.default_rng([seed & _SEED_MASK, lang_key])


def subsample_by_language(
    records: Iterable[WebRecord], quotas: Mapping[str, int], seed: int
) -> list[WebRecord]:
    """Reservoir-sample each quota'd language down to its quota.

    Uses Algorithm R with one seeded generator per language, so a language's
    sample does not depend on which other languages are present. Languages
    absent from ``quotas`` pass through untouched. Output preserves the
    input order of the surviving records.
    """
    for lang, quota in quotas.items():
        if quota < 0:
            raise ValueError(f"negative quota for language {lang!r}: {quota}")
    rngs: dict[str, np.random.Generator] = {}
    seen: dict[str, int] = {}
    reservoirs: dict[str, list[tuple[int, WebRecord]]] = {}
    passthrough: list[tuple[int, WebRecord]] = []

    for index, record in enumerate(records):
        lang = record.lang
        if lang not in quotas:
            passthrough.append((index, record))
            continue
        quota = quotas[lang]
        position = seen.get(lang, 0)
        seen[lang] = position + 1
        if quota == 0:
            continue
        if lang not in rngs:
            rngs[lang] = language_rng(seed, lang)
            reservoirs[lang] = []
        if position < quota:
            reservoirs[lang].append((index, record))
        else:
            slot = int(rngs[lang].integers(0, position + 1))
            if slot < quota:
                reservoirs[lang][slot] = (index, record)

    survivors = passthrough + [pair for pairs in reservoirs.values() for pair in pairs]
    survivors.sort(key=lambda pair: pair[0])
    return [record for _, record in survivors]
