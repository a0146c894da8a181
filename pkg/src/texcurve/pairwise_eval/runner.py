"""Batch judging: run a judge callable over a task list."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from ..errors import TexcurveError
from .types import ComparisonRecord, ComparisonTask, JudgeVerdict, record_from_verdict


def run_judging(
    tasks: Sequence[ComparisonTask],
    judge: Callable[[ComparisonTask], JudgeVerdict],
    jobs: int = 1,
) -> tuple[list[ComparisonRecord], list[dict]]:
    """Judge every task, collecting records and per-task failures.

    A failing task never aborts the batch; it lands in the failure
    report as ``{"task_id", "error"}``. Records and failures are both
    returned sorted by task id so output files are deterministic even
    with ``jobs > 1``.
    """
    if jobs < 1:
        raise ValueError("jobs must be at least 1")

    def work(task: ComparisonTask):
        try:
            return record_from_verdict(task, judge(task)), None
        except TexcurveError as exc:
            return None, {"task_id": task.task_id, "error": str(exc)}

    if jobs == 1:
        outcomes = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, tasks))
    records = sorted(
        (rec for rec, _ in outcomes if rec is not None), key=lambda r: r.task_id
    )
    failures = sorted(
        (err for _, err in outcomes if err is not None), key=lambda e: e["task_id"]
    )
    return records, failures
