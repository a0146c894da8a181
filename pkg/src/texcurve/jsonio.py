"""Canonical JSON helpers shared by every file format in the package."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator


def canonical_dumps(obj: Any) -> str:
    """Serialize ``obj`` with sorted keys and no whitespace.

    The same value always produces the same byte sequence, which makes
    output files diffable and lets determinism be checked with a plain
    byte comparison.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_jsonl(path: str | Path, rows: Iterable[Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(canonical_dumps(row))
            fh.write("\n")


def read_jsonl(path: str | Path) -> Iterator[Any]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
