"""Declarative render-job generation for target and reference views.

A plan pairs six fixed target camera poses (uniform lighting) with a
set of randomized reference views whose camera jitter and lighting are
drawn from a seeded generator. Plans are emitted as canonical JSON so
the same object id and master seed always produce identical bytes; the
renderer consuming a plan re-derives any extra randomness it needs from
the per-view lighting seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import TexcurveError
from .jsonio import canonical_dumps

PLAN_SCHEMA = "renderplan/1"

TARGET_AZIMUTHS = (0.0, 90.0, 180.0, 270.0, 0.0, 0.0)
TARGET_ZENITHS = (0.0, 0.0, 0.0, 0.0, -90.0, 90.0)
TARGET_LABELS = ("front", "right", "back", "left", "bottom", "top")

AZIMUTH_JITTER = (-30.0, 30.0)
ELEVATION_JITTER = (-10.0, 30.0)

DEFAULT_REFERENCE_COUNT = 15
DEFAULT_HDRI_POOL = 100

LIGHT_KINDS = ("point", "area", "hdri")


@dataclass(frozen=True)
class LightingRanges:
    """Sampling ranges for the randomized lighting parameters.

    Distances are in object bounding-radius units; intensity is a
    unitless multiplier of the renderer's default emitter strength;
    area extent is the emitter's edge length in the same radius units.
    """

    distance: tuple[float, float] = (1.5, 4.0)
    intensity: tuple[float, float] = (0.5, 2.0)
    area_extent: tuple[float, float] = (0.5, 2.0)


DEFAULT_RANGES = LightingRanges()


@dataclass(frozen=True)
class CameraPose:
    """One camera placement in degrees.

    ``convention`` states how ``angle`` is measured: ``"zenith"`` for
    the fixed target views (0 at the equator, +-90 at the poles along
    the view axis) and ``"elevation"`` for jittered reference views.
    """

    label: str
    azimuth: float
    angle: float
    convention: str

    def __post_init__(self):
        if self.convention not in ("zenith", "elevation"):
            raise ValueError(f"unknown angle convention {self.convention!r}")


@dataclass(frozen=True)
class LightingConfig:
    """One lighting setup: the kind, its parameters, and the seed used."""

    kind: str
    params: Mapping[str, Any]
    seed: int

    def __post_init__(self):
        if self.kind not in LIGHT_KINDS:
            raise ValueError(f"unknown light kind {self.kind!r}")


@dataclass(frozen=True)
class ReferenceView:
    """A jittered camera pose plus the lighting it is rendered under."""

    camera: CameraPose
    lighting: LightingConfig


@dataclass(frozen=True)
class RenderPlan:
    """All render jobs for one object: targets, references, and the seed."""

    object_id: str
    seed: int
    target_views: tuple[CameraPose, ...]
    reference_views: tuple[ReferenceView, ...]


def generate_target_views() -> tuple[CameraPose, ...]:
    """The six canonical target poses: four sides plus bottom and top."""
    return tuple(
        CameraPose(label=label, azimuth=az, angle=zen, convention="zenith")
        for label, az, zen in zip(TARGET_LABELS, TARGET_AZIMUTHS, TARGET_ZENITHS)
    )


def _open_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    # rng.uniform is half-open [lo, hi); resample the boundary to get (lo, hi)
    while True:
        v = float(rng.uniform(lo, hi))
        if lo < v < hi:
            return v


def _sample_lighting(
    rng: np.random.Generator,
    hdri_pool: int,
    ranges: LightingRanges,
) -> LightingConfig:
    kind = LIGHT_KINDS[int(rng.integers(0, len(LIGHT_KINDS)))]
    seed = int(rng.integers(0, 2**32))
    sub = np.random.default_rng(seed)
    params: dict[str, Any] = {}
    if kind in ("point", "area"):
        params["azimuth_deg"] = float(sub.uniform(0.0, 360.0))
        params["elevation_deg"] = float(sub.uniform(-90.0, 90.0))
        params["distance"] = float(sub.uniform(*ranges.distance))
        params["intensity"] = float(sub.uniform(*ranges.intensity))
        if kind == "area":
            params["extent"] = float(sub.uniform(*ranges.area_extent))
    else:
        params["hdri_id"] = int(sub.integers(0, hdri_pool))
        params["rotation_deg"] = float(sub.uniform(0.0, 360.0))
    return LightingConfig(kind=kind, params=params, seed=seed)


def generate_reference_views(
    seed: int | np.random.SeedSequence,
    count: int = DEFAULT_REFERENCE_COUNT,
    hdri_pool: int = DEFAULT_HDRI_POOL,
    ranges: LightingRanges = DEFAULT_RANGES,
) -> tuple[ReferenceView, ...]:
    """Draw ``count`` jittered reference views from a seeded generator.

    Camera azimuth is sampled from the open interval (-30, 30) degrees
    and elevation from (-10, 30); the lighting kind is uniform over
    point, area and hdri lights. The draw order per view is fixed:
    lighting kind, lighting seed, camera azimuth, camera elevation; the
    kind-specific parameters come from their own seeded sub-generator.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if hdri_pool < 1:
        raise ValueError("hdri_pool must be at least 1")
    rng = np.random.default_rng(seed)
    views = []
    for i in range(count):
        lighting = _sample_lighting(rng, hdri_pool, ranges)
        azimuth = _open_uniform(rng, *AZIMUTH_JITTER)
        elevation = _open_uniform(rng, *ELEVATION_JITTER)
        camera = CameraPose(
            label=f"ref_{i:02d}",
            azimuth=azimuth,
            angle=elevation,
            convention="elevation",
        )
        views.append(ReferenceView(camera=camera, lighting=lighting))
    return tuple(views)


def derive_object_seed(master_seed: int, object_id: str) -> np.random.SeedSequence:
    """Stable per-object seed sequence from the master seed and object id."""
    digest = hashlib.sha256(object_id.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    return np.random.SeedSequence([master_seed & 0xFFFFFFFF, *words])


def generate_plan(
    object_id: str,
    master_seed: int,
    reference_count: int = DEFAULT_REFERENCE_COUNT,
    hdri_pool: int = DEFAULT_HDRI_POOL,
    ranges: LightingRanges = DEFAULT_RANGES,
) -> RenderPlan:
    """Build the full render plan for one object.

    Two objects under the same master seed get independent reference
    draws (the per-object stream is keyed by a hash of the object id),
    while the same (object, seed) pair is fully reproducible.
    """
    if not object_id:
        raise ValueError("object_id must be non-empty")
    return RenderPlan(
        object_id=object_id,
        seed=master_seed,
        target_views=generate_target_views(),
        reference_views=generate_reference_views(
            derive_object_seed(master_seed, object_id),
            count=reference_count,
            hdri_pool=hdri_pool,
            ranges=ranges,
        ),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _pose_to_dict(pose: CameraPose) -> dict:
    return {
        "label": pose.label,
        "azimuth_deg": pose.azimuth,
        "angle_deg": pose.angle,
        "convention": pose.convention,
        "distance": None,
        "fov_deg": None,
    }


def _pose_from_dict(obj: dict) -> CameraPose:
    return CameraPose(
        label=str(obj["label"]),
        azimuth=float(obj["azimuth_deg"]),
        angle=float(obj["angle_deg"]),
        convention=str(obj["convention"]),
    )


def emit_plan(plan: RenderPlan) -> bytes:
    """Serialize a plan to canonical JSON bytes (UTF-8, trailing newline)."""
    doc = {
        "schema": PLAN_SCHEMA,
        "object_id": plan.object_id,
        "seed": plan.seed,
        "target_views": [_pose_to_dict(p) for p in plan.target_views],
        "reference_views": [
            {
                "camera": _pose_to_dict(v.camera),
                "lighting": {
                    "kind": v.lighting.kind,
                    "params": dict(v.lighting.params),
                    "seed": v.lighting.seed,
                },
            }
            for v in plan.reference_views
        ],
    }
    return (canonical_dumps(doc) + "\n").encode("utf-8")


def parse_plan(data: bytes) -> RenderPlan:
    """Inverse of :func:`emit_plan`; validates the schema marker."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TexcurveError(f"malformed render plan: {exc}") from exc
    if doc.get("schema") != PLAN_SCHEMA:
        raise TexcurveError(f"unexpected plan schema {doc.get('schema')!r}")
    try:
        return RenderPlan(
            object_id=str(doc["object_id"]),
            seed=int(doc["seed"]),
            target_views=tuple(_pose_from_dict(p) for p in doc["target_views"]),
            reference_views=tuple(
                ReferenceView(
                    camera=_pose_from_dict(v["camera"]),
                    lighting=LightingConfig(
                        kind=str(v["lighting"]["kind"]),
                        params=dict(v["lighting"]["params"]),
                        seed=int(v["lighting"]["seed"]),
                    ),
                )
                for v in doc["reference_views"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TexcurveError(f"malformed render plan: {exc}") from exc
