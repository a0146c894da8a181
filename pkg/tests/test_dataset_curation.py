"""Corpus scoring, manifest IO, ranking, and bounded-memory behavior."""

from __future__ import annotations

import json
import threading

import numpy as np
import pytest

from texcurve.dataset_curation import (
    CurationManifest,
    ManifestMeta,
    ObjectRecord,
    ScoringConfig,
    ViewRef,
    load_manifest,
    save_manifest,
    score_corpus,
    score_object,
    select_top_k,
)
from texcurve.errors import EmptySelection, ViewLoadError
from texcurve.quality_metrics import QualityScore, total_score

from .conftest import random_rgba, solid_rgba, write_png


def _corpus(tmp_path, rng, n_objects=4, views=2, size=16):
    records = []
    for i in range(n_objects):
        refs = []
        for v in range(views):
            path = write_png(
                tmp_path / f"obj{i}_v{v}.png", random_rgba(rng, size, size)
            )
            refs.append(ViewRef(label=f"v{v}", path=path))
        records.append(ObjectRecord(object_id=f"obj-{i:03d}", views=tuple(refs)))
    return CurationManifest(meta=ManifestMeta(), records=tuple(records))


class MemoryTracker:
    """Counts concurrently held decoded views to verify bounded memory."""

    def __init__(self):
        self._lock = threading.Lock()
        self.live = 0
        self.peak = 0
        self.events = 0

    def acquired(self, path):
        with self._lock:
            self.live += 1
            self.peak = max(self.peak, self.live)
            self.events += 1

    def released(self, path):
        with self._lock:
            self.live -= 1


# -- score_object --------------------------------------------------------------


def test_score_object_aggregates_view_means(tmp_path, rng):
    config = ScoringConfig()
    a = write_png(tmp_path / "a.png", random_rgba(rng, 12, 12))
    b = write_png(tmp_path / "b.png", random_rgba(rng, 12, 12))
    record = ObjectRecord(
        object_id="x",
        views=(ViewRef("v0", a), ViewRef("v1", b)),
    )
    from texcurve.image_core import load_image
    from texcurve.quality_metrics import color_entropy, texture_complexity

    per = [
        (color_entropy(load_image(p)), texture_complexity(load_image(p)))
        for p in (a, b)
    ]
    expect_color = (per[0][0] + per[1][0]) / 2
    expect_texture = (per[0][1] + per[1][1]) / 2
    score = score_object(record, config)
    assert score.c_color == pytest.approx(expect_color, abs=1e-12)
    assert score.c_texture == pytest.approx(expect_texture, abs=1e-12)
    assert score.c_total == total_score(score.c_color, score.c_texture)


def test_score_object_max_aggregate(tmp_path, rng):
    flat = write_png(tmp_path / "flat.png", solid_rgba(12, 12, (50, 50, 50)))
    busy = write_png(tmp_path / "busy.png", random_rgba(rng, 12, 12))
    record = ObjectRecord("x", (ViewRef("v0", flat), ViewRef("v1", busy)))
    mean_score = score_object(record, ScoringConfig(view_aggregate="mean"))
    max_score = score_object(record, ScoringConfig(view_aggregate="max"))
    assert max_score.c_texture > mean_score.c_texture
    assert max_score.c_color > mean_score.c_color


def test_score_object_lists_every_failing_path(tmp_path, rng):
    good = write_png(tmp_path / "ok.png", random_rgba(rng, 8, 8))
    missing1 = str(tmp_path / "gone1.png")
    missing2 = str(tmp_path / "gone2.png")
    record = ObjectRecord(
        "x",
        (ViewRef("v0", good), ViewRef("v1", missing1), ViewRef("v2", missing2)),
    )
    with pytest.raises(ViewLoadError) as exc_info:
        score_object(record, ScoringConfig())
    failed_paths = [p for p, _ in exc_info.value.failures]
    assert failed_paths == [missing1, missing2]


def test_score_object_propagates_empty_selection(tmp_path):
    transparent = write_png(
        tmp_path / "ghost.png", solid_rgba(8, 8, (10, 10, 10), alpha=0)
    )
    record = ObjectRecord("x", (ViewRef("v0", transparent),))
    with pytest.raises(EmptySelection):
        score_object(record, ScoringConfig(mask_mode="alpha"))


def test_score_object_bounded_memory(tmp_path, rng):
    record = ObjectRecord(
        "x",
        tuple(
            ViewRef(f"v{i}", write_png(tmp_path / f"m{i}.png", random_rgba(rng, 8, 8)))
            for i in range(6)
        ),
    )
    tracker = MemoryTracker()
    score_object(record, ScoringConfig(), tracker=tracker)
    assert tracker.events == 6
    assert tracker.peak == 1
    assert tracker.live == 0


# -- score_corpus ----------------------------------------------------------------


def test_score_corpus_marks_failures_and_keeps_order(tmp_path, rng):
    manifest = _corpus(tmp_path, rng, n_objects=4)
    broken = ObjectRecord(
        "obj-zzz", (ViewRef("v0", str(tmp_path / "never.png")),)
    )
    manifest = CurationManifest(
        meta=manifest.meta, records=manifest.records[:2] + (broken,) + manifest.records[2:]
    )
    scored, failures = score_corpus(manifest, ScoringConfig())
    assert [r.object_id for r in scored.records] == [
        "obj-000", "obj-001", "obj-zzz", "obj-002", "obj-003",
    ]
    assert [f["object_id"] for f in failures] == ["obj-zzz"]
    assert scored.records[2].failed and scored.records[2].score is None
    assert all(r.score is not None for r in scored.records if not r.failed)


def test_score_corpus_parallel_matches_serial(tmp_path, rng):
    manifest = _corpus(tmp_path, rng, n_objects=6)
    serial, _ = score_corpus(manifest, ScoringConfig(jobs=1))
    parallel, _ = score_corpus(manifest, ScoringConfig(jobs=4))
    for a, b in zip(serial.records, parallel.records):
        assert a.object_id == b.object_id
        assert a.score.c_total == b.score.c_total


def test_score_corpus_bounded_by_worker_count(tmp_path, rng):
    manifest = _corpus(tmp_path, rng, n_objects=8, views=3)
    tracker = MemoryTracker()
    score_corpus(manifest, ScoringConfig(jobs=2), tracker=tracker)
    assert tracker.events == 24
    assert tracker.peak <= 2
    assert tracker.live == 0


# -- select_top_k ----------------------------------------------------------------


def _scored_manifest(entries):
    records = []
    for object_id, c_total in entries:
        records.append(
            ObjectRecord(
                object_id=object_id,
                views=(ViewRef("v0", f"{object_id}.png"),),
                score=QualityScore(
                    c_color=0.0, c_texture=c_total, c_total=c_total
                ),
            )
        )
    return CurationManifest(meta=ManifestMeta(), records=tuple(records))


def test_select_top_k_orders_by_score_then_id():
    manifest = _scored_manifest(
        [("b", 10.0), ("a", 10.0), ("c", 30.0), ("d", 20.0)]
    )
    top = select_top_k(manifest, 3)
    assert [r.object_id for r in top.records] == ["c", "d", "a"]
    assert top.meta.sorted is True


def test_select_top_k_excludes_failed_and_validates():
    records = (
        ObjectRecord("ok", (ViewRef("v", "p"),),
                     score=QualityScore(0.0, 5.0, 5.0)),
        ObjectRecord("bad", (ViewRef("v", "p"),), failed=True),
    )
    manifest = CurationManifest(meta=ManifestMeta(), records=records)
    top = select_top_k(manifest, 5)
    assert [r.object_id for r in top.records] == ["ok"]
    with pytest.raises(ValueError):
        select_top_k(manifest, -1)
    pending = CurationManifest(
        meta=ManifestMeta(),
        records=(ObjectRecord("new", (ViewRef("v", "p"),)),),
    )
    with pytest.raises(ValueError):
        select_top_k(pending, 1)


# -- manifest IO -----------------------------------------------------------------


def test_manifest_round_trip(tmp_path, rng):
    manifest = _corpus(tmp_path, rng, n_objects=3)
    scored, _ = score_corpus(manifest, ScoringConfig(color_weight=20.0))
    path = tmp_path / "m.jsonl"
    save_manifest(scored, path)
    loaded = load_manifest(path)
    assert loaded.meta.color_weight == 20.0
    assert len(loaded.records) == 3
    for a, b in zip(scored.records, loaded.records):
        assert a.object_id == b.object_id
        assert a.score.c_total == b.score.c_total
        assert [v.path for v in a.views] == [v.path for v in b.views]
    # header goes first and declares the schema
    first = json.loads(path.read_text().splitlines()[0])
    assert first["manifest_meta"]["schema"] == "curation/1"
    assert first["manifest_meta"]["lambda"] == 20.0


def test_manifest_without_header_gets_defaults(tmp_path):
    path = tmp_path / "raw.jsonl"
    path.write_text(
        '{"object_id":"x","views":[{"label":"v0","path":"x.png"}],"score":null}\n'
    )
    manifest = load_manifest(path)
    assert manifest.meta.color_weight == 35.0
    assert manifest.records[0].object_id == "x"


def test_manifest_rejects_duplicate_ids():
    with pytest.raises(ValueError):
        CurationManifest(
            meta=ManifestMeta(),
            records=(
                ObjectRecord("x", (ViewRef("v", "a.png"),)),
                ObjectRecord("x", (ViewRef("v", "b.png"),)),
            ),
        )


def test_rescoring_scored_manifest_is_byte_identical(tmp_path, rng):
    manifest = _corpus(tmp_path, rng, n_objects=3)
    scored, _ = score_corpus(manifest, ScoringConfig())
    p1, p2 = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
    save_manifest(scored, p1)
    rescored, _ = score_corpus(load_manifest(p1), ScoringConfig())
    save_manifest(rescored, p2)
    assert p1.read_bytes() == p2.read_bytes()
