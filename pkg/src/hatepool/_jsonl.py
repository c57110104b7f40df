"""JSON-lines and atomic-file helpers shared by the pipeline stages.

All serialization in this package goes through :func:`dumps` so that a
fixed input always produces byte-identical output: keys are sorted,
non-ASCII text is written verbatim, and separators carry no whitespace.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from contextlib import contextmanager
from typing import Any, Iterator, TextIO


def dumps(obj: Any) -> str:
    """Serialize ``obj`` to a canonical single-line JSON string."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def dumps_pretty(obj: Any) -> str:
    """Serialize ``obj`` to indented JSON with sorted keys (for reports)."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)


def write_jsonl_line(fp: TextIO, obj: Any) -> None:
    fp.write(dumps(obj))
    fp.write("\n")


def iter_jsonl(fp: TextIO) -> Iterator[Any]:
    """Yield one decoded object per non-blank line; malformed lines raise ValueError."""
    for lineno, line in enumerate(fp, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            yield json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc


def iter_jsonl_tolerant(fp: TextIO, on_error) -> Iterator[Any]:
    """Like :func:`iter_jsonl`, but call ``on_error(lineno)`` and skip bad lines."""
    for lineno, line in enumerate(fp, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            yield json.loads(stripped)
        except json.JSONDecodeError:
            on_error(lineno)


@contextmanager
def open_input(path: str) -> Iterator[TextIO]:
    """Open ``path`` for reading; ``-`` means stdin."""
    if path == "-":
        yield sys.stdin
        return
    with open(path, "r", encoding="utf-8") as fp:
        yield fp


@contextmanager
def atomic_output(path: str) -> Iterator[TextIO]:
    """Write to a temp file and rename over ``path`` on success; ``-`` means stdout.

    The rename only happens when the body completes without raising, so a
    crashed run never leaves a truncated output file behind.
    """
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fp:
            yield fp
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def write_json_file(path: str, obj: Any) -> None:
    """Atomically write ``obj`` as indented JSON with a trailing newline."""
    with atomic_output(path) as fp:
        fp.write(dumps_pretty(obj))
        fp.write("\n")


def read_json_file(path: str) -> Any:
    with open_input(path) as fp:
        return json.load(fp)
