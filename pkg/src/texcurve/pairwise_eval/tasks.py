"""Task-list construction and grid rendering for pairwise evaluation."""

from __future__ import annotations

from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import MissingSample
from ..image_core import load_image
from .grid import DEFAULT_CELL_SIZE, DEFAULT_STRIP_HEIGHT, assemble_grid, save_png
from .types import ComparisonTask, MethodEntry, make_task_id


def build_tasks(
    methods: Sequence[MethodEntry],
    samples: Sequence[str],
    dimensions: Sequence[str],
    reference_paths: Mapping[str, str],
    grid_dir: str | Path,
    seed: int = 0,
) -> list[ComparisonTask]:
    """Enumerate every (dimension, sample, method pair) comparison task.

    Produces ``C(len(methods), 2) * len(samples) * len(dimensions)``
    tasks in a deterministic order (dimension-major, then sample, then
    the sorted method pair). Option positions are swapped by a seeded
    coin flip per task, recorded on the task. Raises
    :class:`~texcurve.errors.MissingSample` when any method or the
    reference set does not cover a requested sample.
    """
    if len(methods) < 2:
        raise ValueError("need at least two methods to compare")
    ids = [m.method_id for m in methods]
    if len(set(ids)) != len(ids):
        raise ValueError("method ids must be unique")
    if len(set(samples)) != len(samples):
        raise ValueError("sample ids must be unique")
    if not samples:
        raise ValueError("need at least one sample")
    if not dimensions:
        raise ValueError("need at least one dimension")
    for method in methods:
        for sample in samples:
            if sample not in method.renders:
                raise MissingSample(
                    f"method {method.method_id!r} has no renders for sample {sample!r}"
                )
    for sample in samples:
        if sample not in reference_paths:
            raise MissingSample(f"no reference image for sample {sample!r}")

    grid_dir = Path(grid_dir)
    pairs = list(combinations(sorted(ids), 2))
    rng = np.random.default_rng(seed)
    swaps = rng.integers(0, 2, size=len(dimensions) * len(samples) * len(pairs))
    tasks = []
    flat = 0
    for dimension in dimensions:
        for sample in samples:
            for method_a, method_b in pairs:
                task_id = make_task_id(dimension, sample, method_a, method_b)
                tasks.append(
                    ComparisonTask(
                        task_id=task_id,
                        sample_id=sample,
                        dimension=dimension,
                        method_a=method_a,
                        method_b=method_b,
                        reference_path=str(reference_paths[sample]),
                        grid_path=str(grid_dir / f"{task_id}.png"),
                        position_swapped=bool(swaps[flat]),
                    )
                )
                flat += 1
    return tasks


def render_grids(
    tasks: Sequence[ComparisonTask],
    methods: Sequence[MethodEntry],
    cell_size: int = DEFAULT_CELL_SIZE,
    strip_height: int = DEFAULT_STRIP_HEIGHT,
) -> list[str]:
    """Assemble and write the grid image of every task.

    Each distinct grid path is written exactly once; images are loaded,
    composed and released one task at a time. Returns the list of
    written paths. Decode failures propagate so a broken input is
    reported before any judging starts.
    """
    by_id = {m.method_id: m for m in methods}
    written: list[str] = []
    done: set[str] = set()
    for task in tasks:
        if task.grid_path in done:
            continue
        done.add(task.grid_path)
        top_id, bottom_id = task.option_methods()
        reference = load_image(task.reference_path)
        top = [load_image(p) for p in by_id[top_id].renders[task.sample_id]]
        bottom = [load_image(p) for p in by_id[bottom_id].renders[task.sample_id]]
        image = assemble_grid(
            reference, top, bottom, cell_size=cell_size, strip_height=strip_height
        )
        save_png(image, task.grid_path)
        written.append(task.grid_path)
    return written
