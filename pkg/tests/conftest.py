"""Shared fixtures and image helpers for the test suite."""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from texcurve.image_core import RgbaImage

GOLDEN_DIR = Path(__file__).parent / "golden"
REGEN_ENV = "TEXCURVE_REGEN_GOLDEN"


def make_rgba(rgb, alpha: int = 255) -> RgbaImage:
    """Wrap an (h, w, 3) or (h, w, 4) uint8 array as an RgbaImage."""
    arr = np.asarray(rgb, dtype=np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 3:
        a = np.full(arr.shape[:2] + (1,), alpha, dtype=np.uint8)
        arr = np.concatenate([arr, a], axis=2)
    return RgbaImage(np.ascontiguousarray(arr))


def solid_rgba(h: int, w: int, color, alpha: int = 255) -> RgbaImage:
    arr = np.zeros((h, w, 4), dtype=np.uint8)
    arr[..., 0], arr[..., 1], arr[..., 2] = color
    arr[..., 3] = alpha
    return RgbaImage(arr)


def random_rgba(rng: np.random.Generator, h: int, w: int, opaque: bool = True) -> RgbaImage:
    arr = rng.integers(0, 256, size=(h, w, 4), dtype=np.uint8)
    if opaque:
        arr[..., 3] = 255
    return RgbaImage(arr)


def png_bytes(image: RgbaImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(image.pixels, "RGBA").save(buf, format="PNG")
    return buf.getvalue()


def write_png(path, image: RgbaImage) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(image.pixels, "RGBA").save(path, format="PNG")
    return str(path)


def assert_matches_golden(image: RgbaImage, name: str) -> None:
    """Compare an image pixel-exactly against a stored golden PNG.

    Set TEXCURVE_REGEN_GOLDEN=1 to rewrite the goldens instead.
    """
    golden_path = GOLDEN_DIR / name
    if os.environ.get(REGEN_ENV, "") == "1":
        GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
        Image.fromarray(image.pixels, "RGBA").save(golden_path, format="PNG")
        pytest.skip(f"regenerated golden {name}")
    assert golden_path.exists(), (
        f"golden {name} missing; run with {REGEN_ENV}=1 to create it"
    )
    expected = np.asarray(Image.open(golden_path).convert("RGBA"), dtype=np.uint8)
    assert image.pixels.shape == expected.shape, (
        f"golden {name}: shape {image.pixels.shape} != {expected.shape}"
    )
    mismatch = int((image.pixels != expected).sum())
    assert mismatch == 0, f"golden {name}: {mismatch} differing components"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
