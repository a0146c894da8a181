"""Blind pairwise comparison of texture-generation methods.

Workflow: enumerate tasks over every method pair, sample and judging
dimension (:mod:`.tasks`), render each task's comparison grid
(:mod:`.grid`), collect verdicts from a hosted model, a scripted mock,
or people over HTTP (:mod:`.judges`, :mod:`.human`), and persist the
comparison records (:mod:`.records`) that the rating engine consumes.
"""

from .grid import assemble_grid, save_png
from .human import HumanQueue, JudgingServer, load_instruction
from .judges import (
    VlmConfig,
    judge_mock,
    judge_vlm,
    load_prompt,
    option_to_winner,
    parse_option_choice,
)
from .records import (
    read_records,
    read_tasks,
    record_from_dict,
    record_to_dict,
    task_from_dict,
    task_to_dict,
    write_records,
    write_tasks,
)
from .runner import run_judging
from .tasks import build_tasks, render_grids
from .types import (
    DIMENSIONS,
    VIEWS_PER_SAMPLE,
    WINNER_TO_SCORE,
    ComparisonRecord,
    ComparisonTask,
    JudgeVerdict,
    MethodEntry,
    make_task_id,
    record_from_verdict,
)

__all__ = [
    "DIMENSIONS",
    "VIEWS_PER_SAMPLE",
    "WINNER_TO_SCORE",
    "ComparisonRecord",
    "ComparisonTask",
    "HumanQueue",
    "JudgeVerdict",
    "JudgingServer",
    "MethodEntry",
    "VlmConfig",
    "assemble_grid",
    "build_tasks",
    "judge_mock",
    "judge_vlm",
    "load_instruction",
    "load_prompt",
    "make_task_id",
    "option_to_winner",
    "parse_option_choice",
    "read_records",
    "read_tasks",
    "record_from_dict",
    "record_from_verdict",
    "record_to_dict",
    "render_grids",
    "run_judging",
    "save_png",
    "task_from_dict",
    "task_to_dict",
    "write_records",
    "write_tasks",
]
