"""Judging backends: a hosted vision-language model and a scripted mock.

Both backends receive a :class:`ComparisonTask`, look only at the blind
option positions, and return a :class:`JudgeVerdict` already translated
back into method terms (the position swap is undone here, so downstream
code never reasons about option order).
"""

from __future__ import annotations

import base64
import logging
import os
import re
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import requests

from ..errors import TransportError, UnknownMethod, UnparseableVerdict
from .types import VIEWS_PER_SAMPLE, ComparisonTask, DIMENSIONS, JudgeVerdict

logger = logging.getLogger(__name__)

ENV_API_KEY = "TEXCURVE_VLM_API_KEY"
ENV_ENDPOINT = "TEXCURVE_VLM_ENDPOINT"

#: Verdict tokens the model must end with, mapped to option choices.
TOKEN_TO_OPTION = {"OPTION1": "option1", "OPTION2": "option2", "TIE": "tie"}

_TOKEN_RE = re.compile(r"\b(OPTION1|OPTION2|TIE)\b")


@dataclass(frozen=True)
class VlmConfig:
    """Connection and retry settings for the hosted judge."""

    endpoint: str
    model: str
    api_key: str | None = None
    timeout_s: float = 120.0
    retries: int = 3
    backoff_s: float = 1.0
    max_tokens: int = 768
    temperature: float = 0.0
    prompt_dir: str | None = None

    def __post_init__(self):
        if not self.endpoint:
            raise ValueError("endpoint must be non-empty")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")

    def resolved_key(self) -> str | None:
        return self.api_key or os.environ.get(ENV_API_KEY) or None


def load_prompt(dimension: str, prompt_dir: str | None = None) -> str:
    """Load the judging prompt for a dimension and fill its placeholders.

    Templates live under ``texcurve/prompts`` and can be overridden by
    pointing ``prompt_dir`` at a directory with the same file names.
    Lines starting with ``#`` are template comments and are stripped.
    """
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown judging dimension {dimension!r}")
    name = f"{dimension}.txt"
    if prompt_dir is not None:
        text = Path(prompt_dir, name).read_text(encoding="utf-8")
    else:
        text = (resources.files("texcurve") / "prompts" / name).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return "\n".join(lines).strip().format(views_per_method=VIEWS_PER_SAMPLE)


def parse_option_choice(text: str) -> str:
    """Extract the final verdict token from a model reply.

    The reply may contain reasoning that mentions earlier tokens; only
    the last occurrence counts. Raises
    :class:`~texcurve.errors.UnparseableVerdict` when no token appears.
    """
    matches = _TOKEN_RE.findall(text or "")
    if not matches:
        raise UnparseableVerdict(f"no verdict token in reply: {text!r:.200}")
    return TOKEN_TO_OPTION[matches[-1]]


def option_to_winner(option: str, position_swapped: bool) -> str:
    """Translate an option choice back into method terms."""
    if option == "tie":
        return "tie"
    if option not in ("option1", "option2"):
        raise ValueError(f"unknown option {option!r}")
    first_is_a = not position_swapped
    if option == "option1":
        return "A" if first_is_a else "B"
    return "B" if first_is_a else "A"


def _encode_grid(grid_path: str) -> str:
    data = Path(grid_path).read_bytes()
    return "data:image/png;base64," + base64.b64encode(data).decode("ascii")


def _build_payload(task: ComparisonTask, config: VlmConfig) -> dict:
    prompt = load_prompt(task.dimension, config.prompt_dir)
    return {
        "model": config.model,
        "temperature": config.temperature,
        "max_tokens": config.max_tokens,
        "messages": [
            {
                "role": "user",
                "content": [
                    {"type": "text", "text": prompt},
                    {
                        "type": "image_url",
                        "image_url": {"url": _encode_grid(task.grid_path)},
                    },
                ],
            }
        ],
    }


def _extract_content(body: dict) -> str:
    try:
        content = body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise UnparseableVerdict(f"reply missing message content: {exc}") from exc
    if not isinstance(content, str):
        raise UnparseableVerdict("reply content is not text")
    return content


def judge_vlm(
    task: ComparisonTask,
    config: VlmConfig,
    session: requests.Session | None = None,
) -> JudgeVerdict:
    """Ask the hosted model to judge one task.

    Transport failures, server errors and unparseable replies are all
    retried with exponential backoff up to ``config.retries`` times;
    client errors (4xx) fail immediately. The final failure is raised
    as :class:`TransportError` or :class:`UnparseableVerdict`.
    """
    http = session or requests
    payload = _build_payload(task, config)
    headers = {"Content-Type": "application/json"}
    key = config.resolved_key()
    if key:
        headers["Authorization"] = f"Bearer {key}"
    last_error: Exception | None = None
    for attempt in range(config.retries + 1):
        if attempt:
            time.sleep(config.backoff_s * (2.0 ** (attempt - 1)))
        try:
            response = http.post(
                config.endpoint,
                json=payload,
                headers=headers,
                timeout=config.timeout_s,
            )
        except requests.RequestException as exc:
            last_error = TransportError(f"judge request failed: {exc}")
            logger.warning("attempt %d for %s: %s", attempt + 1, task.task_id, exc)
            continue
        if response.status_code >= 500:
            last_error = TransportError(f"judge endpoint returned {response.status_code}")
            logger.warning(
                "attempt %d for %s: status %d",
                attempt + 1, task.task_id, response.status_code,
            )
            continue
        if response.status_code >= 400:
            raise TransportError(
                f"judge request rejected: {response.status_code} {response.text[:200]}"
            )
        try:
            option = parse_option_choice(_extract_content(response.json()))
        except (UnparseableVerdict, ValueError) as exc:
            last_error = (
                exc if isinstance(exc, UnparseableVerdict) else UnparseableVerdict(str(exc))
            )
            logger.warning("attempt %d for %s: %s", attempt + 1, task.task_id, exc)
            continue
        return JudgeVerdict(
            winner=option_to_winner(option, task.position_swapped),
            judge_id=f"vlm:{config.model}",
            rationale=None,
        )
    assert last_error is not None
    raise last_error


def judge_mock(
    task: ComparisonTask,
    preference_order: Sequence[str],
    judge_id: str = "mock",
) -> JudgeVerdict:
    """Deterministic judge that always prefers the earlier-listed method.

    ``preference_order`` is a total order over method ids, best first.
    Raises :class:`~texcurve.errors.UnknownMethod` when a task names a
    method outside the order.
    """
    rank = {m: i for i, m in enumerate(preference_order)}
    if len(rank) != len(preference_order):
        raise ValueError("preference_order contains duplicate method ids")
    for method in (task.method_a, task.method_b):
        if method not in rank:
            raise UnknownMethod(f"mock judge has no rank for method {method!r}")
    winner = "A" if rank[task.method_a] < rank[task.method_b] else "B"
    return JudgeVerdict(winner=winner, judge_id=judge_id, rationale=None)
