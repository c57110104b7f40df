"""Pipeline command line: filter, ingest, annotate, train-meta, ensemble, evaluate, stats.

Exit codes: 0 success, 1 usage error, 2 data error, 3 partial annotation
(some texts quarantined). All diagnostics go to stderr; only requested
output goes to stdout.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import metadata
from typing import Sequence

from ._jsonl import (
    atomic_output,
    dumps_pretty,
    iter_jsonl,
    iter_jsonl_tolerant,
    open_input,
    read_json_file,
    write_json_file,
    write_jsonl_line,
)
from .datasets import (
    LabeledExample,
    get_dataset_spec,
    ingest_rows,
    load_registry,
    read_dataset_file,
)
from .ensemble import mean_hate_score, mean_label, vote_hate_score, vote_label
from .filtering import FilterConfig, WebRecord, filter_records, subsample_by_language
from .gateway import AnnotatorEndpoint, annotate_batch, read_annotations, write_annotations
from .gbdt import MetaLearnerConfig
from .meta import load_model, predict_meta, save_model, train_meta_on_vectors
from .metrics import GroupSpec, PredictionRow, build_report, default_groups, delta_report, render_report_table
from .poolstats import pool_statistics, render_pool_table
from .prompt import PromptTemplate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3

log = logging.getLogger("hatepool")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors by default; this pipeline
    # reserves 2 for data errors.
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _package_version() -> str:
    try:
        return metadata.version("hatepool")
    except metadata.PackageNotFoundError:
        return "unknown"


def _parse_quota(raw: str) -> tuple[str, int]:
    lang, sep, value = raw.partition("=")
    if not sep or not lang or not value:
        raise argparse.ArgumentTypeError(f"quota must look like LANG=N, got {raw!r}")
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"quota count must be an integer, got {value!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"quota count must be nonnegative, got {n}")
    return lang, n


def _parse_threshold(raw: str) -> tuple[str, float | None]:
    if raw == "mean":
        return "mean", None
    if raw.startswith("fixed:"):
        try:
            return "fixed", float(raw.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad fixed threshold in {raw!r}")
    raise argparse.ArgumentTypeError(
        f"threshold must be 'mean' or 'fixed:<value>', got {raw!r}"
    )


def cmd_filter(args: argparse.Namespace) -> int:
    config = (
        FilterConfig.from_dict(read_json_file(args.config)) if args.config else FilterConfig()
    )
    malformed = [0]

    def on_bad_line(lineno: int) -> None:
        malformed[0] += 1
        log.warning("input line %d is not valid JSON; skipped", lineno)

    with open_input(args.input) as in_fp:
        raw_rows = iter_jsonl_tolerant(in_fp, on_bad_line)
        records = (WebRecord.from_dict(row) for row in raw_rows)
        kept_iter, stats = filter_records(records, config)
        if args.quota:
            quotas = dict(args.quota)
            kept = subsample_by_language(kept_iter, quotas, args.seed)
        else:
            kept = list(kept_iter)
    with atomic_output(args.output) as out_fp:
        for record in kept:
            write_jsonl_line(out_fp, record.to_dict())
    payload = stats.to_dict()
    payload["malformed_lines"] = malformed[0]
    payload["written"] = len(kept)
    if args.stats:
        write_json_file(args.stats, payload)
    else:
        print(dumps_pretty(payload), file=sys.stderr)
    log.info("kept %d of %d records", stats.kept, stats.records_seen)
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    registry = load_registry(args.registry)
    spec = get_dataset_spec(args.dataset, registry)
    count = 0
    with atomic_output(args.output) as out_fp:
        for example in ingest_rows(read_dataset_file(args.input, spec, args.format), spec):
            write_jsonl_line(out_fp, example.to_dict())
            count += 1
    log.info("ingested %d examples from %s", count, args.dataset)
    return EXIT_OK


def _load_endpoints(path: str) -> tuple[list[AnnotatorEndpoint], PromptTemplate]:
    cfg = read_json_file(path)
    if not isinstance(cfg, dict) or "endpoints" not in cfg:
        raise ValueError("endpoints file must be an object with an 'endpoints' list")
    endpoints = [AnnotatorEndpoint.from_dict(e) for e in cfg["endpoints"]]
    template = (
        PromptTemplate.from_dict(cfg["template"]) if "template" in cfg else PromptTemplate()
    )
    return endpoints, template


def cmd_annotate(args: argparse.Namespace) -> int:
    endpoints, template = _load_endpoints(args.endpoints)
    texts: list[tuple[str, str]] = []
    lang_by_id: dict[str, str] = {}
    raw_label_by_id: dict[str, str] = {}
    with open_input(args.input) as in_fp:
        for row in iter_jsonl(in_fp):
            if not isinstance(row, dict) or "id" not in row or "text" not in row:
                raise ValueError(f"input rows need 'id' and 'text' fields: {row!r}")
            text_id = str(row["id"])
            texts.append((text_id, str(row["text"])))
            if "lang" in row and row["lang"] is not None:
                lang_by_id[text_id] = str(row["lang"])
            if "raw_label" in row and row["raw_label"] is not None:
                raw_label_by_id[text_id] = str(row["raw_label"])
            elif "gold" in row and row["gold"] is not None:
                raw_label_by_id[text_id] = str(row["gold"])
    if not texts:
        raise ValueError("no texts to annotate")

    results, quarantined = annotate_batch(texts, endpoints, template, seed=args.seed)
    model_order = sorted(ep.model_id for ep in endpoints)
    with atomic_output(args.output) as out_fp:
        write_annotations(
            out_fp,
            results,
            lang_by_id=lang_by_id,
            raw_label_by_id=raw_label_by_id,
            model_order=model_order,
        )
    if quarantined:
        dead_path = args.dead_letter or (
            f"{args.output}.deadletter.jsonl" if args.output != "-" else "-"
        )
        if dead_path == "-":
            for q in quarantined:
                write_jsonl_line(sys.stderr, q.to_dict())
        else:
            with atomic_output(dead_path) as dead_fp:
                for q in quarantined:
                    write_jsonl_line(dead_fp, q.to_dict())
            log.warning(
                "%d of %d texts quarantined; details in %s",
                len(quarantined),
                len(texts),
                dead_path,
            )
        return EXIT_PARTIAL
    log.info("annotated %d texts on %d endpoints", len(results), len(endpoints))
    return EXIT_OK


def _load_labels(path: str) -> dict[str, LabeledExample]:
    labels: dict[str, LabeledExample] = {}
    with open_input(path) as fp:
        for row in iter_jsonl(fp):
            example = LabeledExample.from_dict(row)
            labels[example.id] = example
    if not labels:
        raise ValueError(f"no labeled examples in {path}")
    return labels


def _meta_config(args: argparse.Namespace) -> MetaLearnerConfig:
    cfg = dict(read_json_file(args.config)) if args.config else {}
    if args.seed is not None:
        cfg["seed"] = args.seed
    return MetaLearnerConfig.from_dict(cfg)


def cmd_train_meta(args: argparse.Namespace) -> int:
    labels = _load_labels(args.labels)
    with open_input(args.annotations) as fp:
        _, rows = read_annotations(fp)
        joined = [(row, labels[row.id]) for row in rows if row.id in labels]
    if not joined:
        raise ValueError("annotations and labels share no ids")
    config = _meta_config(args)
    vectors = [row.vector for row, _ in joined]
    golds = [example.gold for _, example in joined]
    model = train_meta_on_vectors(vectors, golds, config)
    save_model(model, args.model_out)
    log.info(
        "trained meta-learner on %d joined examples (%d trees + %d trees)",
        len(joined),
        len(model.hate_head.trees),
        len(model.neutral_head.trees),
    )
    return EXIT_OK


def cmd_ensemble(args: argparse.Namespace) -> int:
    if args.strategy == "lgb" and not args.model:
        raise ValueError("strategy 'lgb' requires --model")
    model = load_model(args.model) if args.model else None
    labels = _load_labels(args.labels) if args.labels else None
    count = 0
    with open_input(args.annotations) as in_fp, atomic_output(args.output) as out_fp:
        _, rows = read_annotations(in_fp)
        for row in rows:
            if args.strategy == "vote":
                label, score = vote_label(row.vector), vote_hate_score(row.vector)
            elif args.strategy == "mean":
                label, score = mean_label(row.vector), mean_hate_score(row.vector)
            else:
                label, score, _ = predict_meta(model, row.vector)
            out: dict = {
                "id": row.id,
                "lang": row.lang,
                "strategy": args.strategy,
                "label": label.value,
                "score_hate": score,
            }
            if labels is not None:
                example = labels.get(row.id)
                if example is None:
                    log.warning("id %s has no gold label; row emitted without one", row.id)
                else:
                    out["dataset"] = example.dataset
                    out["gold"] = example.gold.value
            write_jsonl_line(out_fp, out)
            count += 1
    if count == 0:
        raise ValueError("no annotation rows to label")
    log.info("labeled %d texts with strategy %s", count, args.strategy)
    return EXIT_OK


def _load_groups(path: str) -> list[GroupSpec]:
    cfg = read_json_file(path)
    if not isinstance(cfg, dict) or not cfg:
        raise ValueError("groups file must be a nonempty object of name -> dataset list")
    return [GroupSpec(name=name, members=frozenset(members)) for name, members in cfg.items()]


def cmd_evaluate(args: argparse.Namespace) -> int:
    rows: list[PredictionRow] = []
    with open_input(args.predictions) as fp:
        for raw in iter_jsonl(fp):
            if "gold" not in raw:
                raise ValueError(
                    f"prediction row {raw.get('id')!r} lacks a gold label; "
                    "run ensemble with --labels"
                )
            rows.append(PredictionRow.from_dict(raw))
    if args.groups:
        groups = _load_groups(args.groups)
        known = set().union(*(g.members for g in groups))
    else:
        registry = load_registry(args.registry)
        groups = default_groups(registry)
        known = set(registry)
    mode, fixed = args.threshold
    report = build_report(
        rows,
        groups=groups,
        threshold_mode=mode,
        threshold_scope=args.threshold_scope,
        fixed_threshold=fixed,
        known_datasets=known,
    )
    payload = report.to_dict()
    if args.baseline:
        baseline = read_json_file(args.baseline)
        payload["deltas"] = {"macro_f1": delta_report(payload, baseline, "macro_f1")}
    write_json_file(args.report, payload)
    if args.table:
        if args.report == "-":
            log.warning("--table skipped because the report went to stdout")
        else:
            sys.stdout.write(render_report_table(report))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    if "lgb" in strategies and not args.model:
        raise ValueError("strategy 'lgb' requires --model")
    model = load_model(args.model) if args.model else None
    with open_input(args.annotations) as fp:
        _, row_iter = read_annotations(fp)
        pool = [
            (row.lang if row.lang is not None else "und", row.vector, row.raw_label)
            for row in row_iter
        ]
    summary = pool_statistics(pool, strategies=strategies, model=model)
    write_json_file(args.output, summary.to_dict())
    if args.table:
        if args.output == "-":
            log.warning("--table skipped because the summary went to stdout")
        else:
            sys.stdout.write(render_pool_table(summary))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="hatepool",
        description="Filter web text, annotate it with a four-model LLM ensemble, "
        "train the boosted-tree combiner, and evaluate against benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_package_version()}")
    parser.add_argument(
        "--log-level",
        default="warning",
        choices=("debug", "info", "warning", "error"),
        help="stderr log verbosity (default: warning)",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("filter", help="keep conversational records, optionally subsample")
    p.add_argument("--input", required=True, help="web records JSONL ('-' for stdin)")
    p.add_argument("--output", required=True, help="kept records JSONL ('-' for stdout)")
    p.add_argument("--config", help="JSON file overriding keywords/schema whitelist")
    p.add_argument(
        "--quota",
        action="append",
        type=_parse_quota,
        metavar="LANG=N",
        help="per-language reservoir quota; repeatable",
    )
    p.add_argument("--seed", type=int, default=0, help="subsampling seed (default: 0)")
    p.add_argument("--stats", help="write filter counters to this JSON file")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("ingest", help="normalize a benchmark dataset to labeled JSONL")
    p.add_argument("--dataset", required=True, help="registry name, e.g. HateXplain")
    p.add_argument("--input", required=True, help="dataset export (csv/tsv/jsonl)")
    p.add_argument("--output", required=True, help="labeled examples JSONL")
    p.add_argument("--registry", help="alternate dataset registry JSON")
    p.add_argument("--format", choices=("csv", "tsv", "jsonl"), help="override format sniffing")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("annotate", help="collect per-model label probabilities over HTTP")
    p.add_argument("--input", required=True, help="texts JSONL with id/text[/lang] fields")
    p.add_argument("--output", required=True, help="annotations JSONL")
    p.add_argument("--endpoints", required=True, help="endpoints config JSON")
    p.add_argument(
        "--dead-letter",
        help="quarantined texts JSONL (default: <output>.deadletter.jsonl)",
    )
    p.add_argument("--seed", type=int, default=0, help="retry-jitter seed (default: 0)")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("train-meta", help="fit the two-head boosted-tree combiner")
    p.add_argument("--annotations", required=True, help="annotations JSONL")
    p.add_argument("--labels", required=True, help="labeled examples JSONL (join on id)")
    p.add_argument("--model-out", required=True, help="model JSON path")
    p.add_argument("--config", help="JSON file with booster hyperparameters")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=cmd_train_meta)

    p = sub.add_parser("ensemble", help="turn annotations into per-text labels and scores")
    p.add_argument("--annotations", required=True, help="annotations JSONL")
    p.add_argument("--strategy", required=True, choices=("vote", "mean", "lgb"))
    p.add_argument("--model", help="model JSON (required for lgb)")
    p.add_argument("--labels", help="labeled examples JSONL; adds dataset/gold to rows")
    p.add_argument("--output", required=True, help="predictions JSONL")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("evaluate", help="score predictions per dataset and group")
    p.add_argument("--predictions", required=True, help="predictions JSONL with gold labels")
    p.add_argument("--report", required=True, help="report JSON ('-' for stdout)")
    p.add_argument("--groups", help="JSON object of group name -> dataset list")
    p.add_argument("--registry", help="alternate dataset registry JSON")
    p.add_argument(
        "--threshold",
        type=_parse_threshold,
        default=("mean", None),
        metavar="mean|fixed:V",
        help="score threshold policy (default: mean)",
    )
    p.add_argument(
        "--threshold-scope",
        default="group",
        choices=("group", "dataset", "global"),
        help="population the mean threshold is taken over (default: group)",
    )
    p.add_argument("--baseline", help="earlier report JSON; adds per-unit macro-F1 deltas")
    p.add_argument("--table", action="store_true", help="also print a text table to stdout")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="summarize an annotated pool")
    p.add_argument("--annotations", required=True, help="annotations JSONL")
    p.add_argument("--output", required=True, help="summary JSON ('-' for stdout)")
    p.add_argument(
        "--strategies",
        default="vote,mean",
        help="comma-separated ensemble strategies (default: vote,mean)",
    )
    p.add_argument("--model", help="model JSON (needed when strategies include lgb)")
    p.add_argument("--table", action="store_true", help="also print a text table to stdout")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
