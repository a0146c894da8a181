"""Corpus-scale scoring, ranking, and top-K selection over rendered views.

A corpus is described by a JSONL manifest: one header line holding a
``manifest_meta`` object, then one line per object listing its rendered
views. Scoring fills in per-object scores; selection keeps the K
highest-scoring objects. All output is canonical JSON, so rescoring an
already-scored manifest with the same settings reproduces the file byte
for byte.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import TexcurveError, ViewLoadError
from .image_core import load_image, resolve_mask
from .jsonio import canonical_dumps, read_jsonl
from .quality_metrics import (
    DEFAULT_COLOR_WEIGHT,
    DEFAULT_ENTROPY_BASE,
    QualityScore,
    color_entropy,
    texture_complexity,
    total_score,
)

MANIFEST_SCHEMA = "curation/1"

VIEW_AGGREGATES = ("mean", "max")


@dataclass(frozen=True)
class ViewRef:
    """One rendered view of an object: a display label and a file path."""

    label: str
    path: str


@dataclass(frozen=True)
class ObjectRecord:
    """One corpus entry; ``score`` is None until the object is scored."""

    object_id: str
    views: tuple[ViewRef, ...]
    score: QualityScore | None = None
    failed: bool = False

    def __post_init__(self):
        if not self.object_id:
            raise ValueError("object_id must be non-empty")
        if not self.views:
            raise ValueError(f"object {self.object_id!r} lists no views")
        labels = [v.label for v in self.views]
        if len(set(labels)) != len(labels):
            raise ValueError(f"object {self.object_id!r} has duplicate view labels")


@dataclass(frozen=True)
class ManifestMeta:
    """Settings and provenance stored on the manifest header line."""

    color_weight: float = DEFAULT_COLOR_WEIGHT
    entropy_base: float = DEFAULT_ENTROPY_BASE
    mask_mode: str = "auto"
    view_aggregate: str = "mean"
    created: str | None = None
    sorted: bool = False


@dataclass(frozen=True)
class CurationManifest:
    """Header metadata plus the ordered object records of one corpus."""

    meta: ManifestMeta
    records: tuple[ObjectRecord, ...]

    def __post_init__(self):
        ids = [r.object_id for r in self.records]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate object ids in manifest: {dupes}")


@dataclass(frozen=True)
class ScoringConfig:
    """Effective settings for one scoring run."""

    color_weight: float = DEFAULT_COLOR_WEIGHT
    entropy_base: float = DEFAULT_ENTROPY_BASE
    mask_mode: str = "auto"
    view_aggregate: str = "mean"
    jobs: int = 1

    def __post_init__(self):
        if self.view_aggregate not in VIEW_AGGREGATES:
            raise ValueError(f"unknown view aggregate {self.view_aggregate!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


def score_object(
    record: ObjectRecord,
    config: ScoringConfig,
    tracker=None,
) -> QualityScore:
    """Score one object by aggregating per-view color and texture scores.

    Views are processed strictly one at a time: each view is decoded,
    scored, and released before the next is touched, so memory use is
    bounded by a single decoded view regardless of view count. The
    optional ``tracker`` receives ``acquired(path)`` / ``released(path)``
    calls around each view's lifetime.

    Raises :class:`~texcurve.errors.ViewLoadError` listing every view
    that failed to load; scoring errors (for example a fully transparent
    view under an alpha mask) propagate as-is.
    """
    failures: list[tuple[str, str]] = []
    per_view: list[tuple[float, float]] = []
    for view in record.views:
        try:
            image = load_image(view.path)
        except TexcurveError as exc:
            failures.append((view.path, str(exc)))
            continue
        if tracker is not None:
            tracker.acquired(view.path)
        try:
            if not failures:
                mask = resolve_mask(image, config.mask_mode)
                c_color = color_entropy(image, mask=mask, base=config.entropy_base)
                c_texture = texture_complexity(image, mask=mask)
                per_view.append((c_color, c_texture))
        finally:
            del image
            if tracker is not None:
                tracker.released(view.path)
    if failures:
        raise ViewLoadError(record.object_id, failures)
    colors = [c for c, _ in per_view]
    textures = [t for _, t in per_view]
    if config.view_aggregate == "max":
        c_color, c_texture = max(colors), max(textures)
    else:
        c_color = sum(colors) / len(colors)
        c_texture = sum(textures) / len(textures)
    return QualityScore(
        c_color=c_color,
        c_texture=c_texture,
        c_total=total_score(c_color, c_texture, config.color_weight),
        color_weight=config.color_weight,
    )


def score_corpus(
    manifest: CurationManifest,
    config: ScoringConfig,
    tracker=None,
) -> tuple[CurationManifest, list[dict]]:
    """Score every record of a manifest, marking unloadable objects failed.

    Returns the scored manifest plus a failure report: one dict per
    failed object with its id and the reason. Record order is preserved
    regardless of ``config.jobs``; with ``jobs > 1`` objects are scored
    on a bounded thread pool, still one view in memory per worker.
    """

    def work(record: ObjectRecord):
        try:
            score = score_object(record, config, tracker=tracker)
            return replace(record, score=score, failed=False), None
        except TexcurveError as exc:
            report = {"object_id": record.object_id, "error": str(exc)}
            return replace(record, score=None, failed=True), report

    if config.jobs == 1:
        results = [work(r) for r in manifest.records]
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(work, manifest.records))
    records = tuple(rec for rec, _ in results)
    failures = [rep for _, rep in results if rep is not None]
    # `created` passes through untouched so identical inputs and settings
    # always reproduce the output file byte for byte
    meta = ManifestMeta(
        color_weight=config.color_weight,
        entropy_base=config.entropy_base,
        mask_mode=config.mask_mode,
        view_aggregate=config.view_aggregate,
        created=manifest.meta.created,
        sorted=False,
    )
    return CurationManifest(meta=meta, records=records), failures


def select_top_k(manifest: CurationManifest, k: int) -> CurationManifest:
    """Keep the ``k`` highest-scoring objects, ties broken by object id.

    Every record must either carry a score or be marked failed; failed
    records never rank. ``k`` larger than the scored population returns
    everything that scored.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    unscored = [
        r.object_id for r in manifest.records if r.score is None and not r.failed
    ]
    if unscored:
        raise ValueError(f"manifest has unscored objects: {unscored}")
    ranked = [r for r in manifest.records if not r.failed]
    ranked.sort(key=lambda r: (-r.score.c_total, r.object_id))
    return CurationManifest(
        meta=replace(manifest.meta, sorted=True),
        records=tuple(ranked[:k]),
    )


# ---------------------------------------------------------------------------
# JSONL serialization
# ---------------------------------------------------------------------------


def _meta_to_dict(meta: ManifestMeta) -> dict:
    return {
        "manifest_meta": {
            "schema": MANIFEST_SCHEMA,
            "lambda": meta.color_weight,
            "entropy_base": meta.entropy_base,
            "mask_mode": meta.mask_mode,
            "view_aggregate": meta.view_aggregate,
            "created": meta.created,
            "sorted": meta.sorted,
        }
    }


def _meta_from_dict(obj: dict) -> ManifestMeta:
    return ManifestMeta(
        color_weight=float(obj.get("lambda", DEFAULT_COLOR_WEIGHT)),
        entropy_base=float(obj.get("entropy_base", DEFAULT_ENTROPY_BASE)),
        mask_mode=str(obj.get("mask_mode", "auto")),
        view_aggregate=str(obj.get("view_aggregate", "mean")),
        created=obj.get("created"),
        sorted=bool(obj.get("sorted", False)),
    )


def _record_to_dict(record: ObjectRecord) -> dict:
    row = {
        "object_id": record.object_id,
        "views": [{"label": v.label, "path": v.path} for v in record.views],
        "score": record.score.as_dict() if record.score is not None else None,
    }
    if record.failed:
        row["failed"] = True
    return row


def _record_from_dict(row: dict, color_weight: float) -> ObjectRecord:
    views = tuple(ViewRef(label=v["label"], path=v["path"]) for v in row["views"])
    score = None
    if row.get("score") is not None:
        s = row["score"]
        score = QualityScore(
            c_color=float(s["c_color"]),
            c_texture=float(s["c_texture"]),
            c_total=float(s["c_total"]),
            color_weight=color_weight,
        )
    return ObjectRecord(
        object_id=row["object_id"],
        views=views,
        score=score,
        failed=bool(row.get("failed", False)),
    )


def save_manifest(manifest: CurationManifest, path: str | Path) -> None:
    """Write a manifest as canonical JSONL with a header line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(_meta_to_dict(manifest.meta)))
        fh.write("\n")
        for record in manifest.records:
            fh.write(canonical_dumps(_record_to_dict(record)))
            fh.write("\n")


def load_manifest(path: str | Path) -> CurationManifest:
    """Read a JSONL manifest; a missing header line yields default meta."""
    meta = ManifestMeta()
    records: list[ObjectRecord] = []
    try:
        rows = list(read_jsonl(path))
    except (OSError, ValueError) as exc:
        raise TexcurveError(f"cannot read manifest {path}: {exc}") from exc
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise TexcurveError(f"manifest line {i + 1} is not an object")
        if i == 0 and "manifest_meta" in row:
            meta = _meta_from_dict(row["manifest_meta"])
            continue
        try:
            records.append(_record_from_dict(row, meta.color_weight))
        except (KeyError, TypeError, ValueError) as exc:
            raise TexcurveError(f"bad manifest line {i + 1}: {exc}") from exc
    return CurationManifest(meta=meta, records=tuple(records))
