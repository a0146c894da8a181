"""Shared task and record types for pairwise method comparison."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Mapping

from ..errors import MismatchedViewCount

VIEWS_PER_SAMPLE = 4

DIMENSIONS = ("reference_alignment", "geometry_consistency", "local_quality")

#: Mapping from a verdict winner to method A's comparison score.
WINNER_TO_SCORE = {"A": 1.0, "B": 0.0, "tie": 0.5}


@dataclass(frozen=True)
class MethodEntry:
    """One competing method and its rendered views, four per sample."""

    method_id: str
    renders: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        if not self.method_id:
            raise ValueError("method_id must be non-empty")
        for sample_id, paths in self.renders.items():
            if len(paths) != VIEWS_PER_SAMPLE:
                raise MismatchedViewCount(
                    f"method {self.method_id!r} sample {sample_id!r} has "
                    f"{len(paths)} views, expected {VIEWS_PER_SAMPLE}"
                )


@dataclass(frozen=True)
class ComparisonTask:
    """One blind pairwise judging unit.

    ``method_a`` and ``method_b`` are ordered canonically; when
    ``position_swapped`` is true, the assembled grid shows method B in
    the top row (option 1) and method A in the bottom row (option 2).
    """

    task_id: str
    sample_id: str
    dimension: str
    method_a: str
    method_b: str
    reference_path: str
    grid_path: str
    position_swapped: bool

    def option_methods(self) -> tuple[str, str]:
        """Method ids shown as (option 1, option 2) on the grid."""
        if self.position_swapped:
            return self.method_b, self.method_a
        return self.method_a, self.method_b


@dataclass(frozen=True)
class JudgeVerdict:
    """A judge's resolved decision about one task, in method terms."""

    winner: str
    judge_id: str
    rationale: str | None = None

    def __post_init__(self):
        if self.winner not in WINNER_TO_SCORE:
            raise ValueError(f"winner must be one of {sorted(WINNER_TO_SCORE)}")


@dataclass(frozen=True)
class ComparisonRecord:
    """The durable outcome of one judged task."""

    task_id: str
    sample_id: str
    dimension: str
    method_a: str
    method_b: str
    c_ij: float
    judge_id: str
    position_swapped: bool

    def __post_init__(self):
        if self.c_ij not in (0.0, 0.5, 1.0):
            raise ValueError("c_ij must be 0, 0.5 or 1")


def record_from_verdict(task: ComparisonTask, verdict: JudgeVerdict) -> ComparisonRecord:
    """Fold a verdict into a comparison record for the rating engine."""
    return ComparisonRecord(
        task_id=task.task_id,
        sample_id=task.sample_id,
        dimension=task.dimension,
        method_a=task.method_a,
        method_b=task.method_b,
        c_ij=WINNER_TO_SCORE[verdict.winner],
        judge_id=verdict.judge_id,
        position_swapped=task.position_swapped,
    )


_SAFE_RE = re.compile(r"[^A-Za-z0-9._-]+")


def make_task_id(dimension: str, sample_id: str, method_a: str, method_b: str) -> str:
    """Stable, filesystem-safe task id for one (dimension, sample, pair).

    The readable prefix uses sanitized components; the hash suffix keeps
    ids unique even when sanitization collides.
    """
    raw = f"{dimension}\x1f{sample_id}\x1f{method_a}\x1f{method_b}"
    digest = hashlib.sha256(raw.encode("utf-8")).hexdigest()[:8]
    safe = "__".join(
        _SAFE_RE.sub("-", part) for part in (dimension, sample_id, method_a, method_b)
    )
    return f"{safe}__{digest}"
