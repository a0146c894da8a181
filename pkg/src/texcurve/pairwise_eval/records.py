"""Durable storage of comparison tasks and judged records as JSONL."""

from __future__ import annotations

import os
from pathlib import Path
from typing import IO, Iterable, Sequence

from ..errors import TexcurveError
from ..jsonio import canonical_dumps, read_jsonl
from .types import ComparisonRecord, ComparisonTask


def task_to_dict(task: ComparisonTask) -> dict:
    return {
        "task_id": task.task_id,
        "sample_id": task.sample_id,
        "dimension": task.dimension,
        "method_a": task.method_a,
        "method_b": task.method_b,
        "reference_path": task.reference_path,
        "grid_path": task.grid_path,
        "position_swapped": task.position_swapped,
    }


def task_from_dict(row: dict) -> ComparisonTask:
    try:
        return ComparisonTask(
            task_id=str(row["task_id"]),
            sample_id=str(row["sample_id"]),
            dimension=str(row["dimension"]),
            method_a=str(row["method_a"]),
            method_b=str(row["method_b"]),
            reference_path=str(row["reference_path"]),
            grid_path=str(row["grid_path"]),
            position_swapped=bool(row["position_swapped"]),
        )
    except KeyError as exc:
        raise TexcurveError(f"task row is missing field {exc}") from exc


def record_to_dict(record: ComparisonRecord) -> dict:
    return {
        "task_id": record.task_id,
        "sample_id": record.sample_id,
        "dimension": record.dimension,
        "method_a": record.method_a,
        "method_b": record.method_b,
        "c_ij": record.c_ij,
        "judge_id": record.judge_id,
        "position_swapped": record.position_swapped,
    }


def record_from_dict(row: dict) -> ComparisonRecord:
    try:
        return ComparisonRecord(
            task_id=str(row["task_id"]),
            sample_id=str(row["sample_id"]),
            dimension=str(row["dimension"]),
            method_a=str(row["method_a"]),
            method_b=str(row["method_b"]),
            c_ij=float(row["c_ij"]),
            judge_id=str(row["judge_id"]),
            position_swapped=bool(row["position_swapped"]),
        )
    except KeyError as exc:
        raise TexcurveError(f"record row is missing field {exc}") from exc


def write_tasks(tasks: Sequence[ComparisonTask], path: str | Path) -> None:
    _write_rows((task_to_dict(t) for t in tasks), path)


def read_tasks(path: str | Path) -> list[ComparisonTask]:
    return [task_from_dict(row) for row in read_jsonl(path)]


def write_records(records: Sequence[ComparisonRecord], path: str | Path) -> None:
    _write_rows((record_to_dict(r) for r in records), path)


def read_records(path: str | Path) -> list[ComparisonRecord]:
    return [record_from_dict(row) for row in read_jsonl(path)]


def append_record(fh: IO[str], record: ComparisonRecord) -> None:
    """Append one record line and force it to disk before returning.

    Used by the interactive judging server so that an interrupted
    session never loses an acknowledged verdict.
    """
    fh.write(canonical_dumps(record_to_dict(record)))
    fh.write("\n")
    fh.flush()
    os.fsync(fh.fileno())


def _write_rows(rows: Iterable[dict], path: str | Path) -> None:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(canonical_dumps(row))
            fh.write("\n")
