"""Comparison-grid assembly: reference column plus two option rows."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..errors import MismatchedViewCount
from ..image_core import RgbaImage
from .types import VIEWS_PER_SAMPLE

DEFAULT_CELL_SIZE = 512
DEFAULT_STRIP_HEIGHT = 64

CANVAS_COLOR = (255, 255, 255, 255)
STRIP_COLOR = (34, 34, 34, 255)
STRIP_TEXT_COLOR = (240, 240, 240, 255)


def _to_pil(image: RgbaImage) -> Image.Image:
    return Image.fromarray(image.pixels, mode="RGBA")


def _fit_cell(img: Image.Image, cell: int) -> Image.Image:
    if img.size == (cell, cell):
        return img
    return img.resize((cell, cell), Image.Resampling.LANCZOS)


def assemble_grid(
    reference: RgbaImage,
    views_top: Sequence[RgbaImage],
    views_bottom: Sequence[RgbaImage],
    cell_size: int = DEFAULT_CELL_SIZE,
    strip_height: int = DEFAULT_STRIP_HEIGHT,
) -> RgbaImage:
    """Compose the blind judging grid.

    Layout: a header strip naming the panels, a reference column on the
    left spanning both rows, then option 1's four views along the top
    row and option 2's along the bottom. Every panel is resized to
    ``cell_size`` square and composited over a white background, so
    transparent renders stay readable. The result is
    ``(1 + 4) * cell_size`` wide and ``2 * cell_size + strip_height``
    tall.
    """
    for name, views in (("top", views_top), ("bottom", views_bottom)):
        if len(views) != VIEWS_PER_SAMPLE:
            raise MismatchedViewCount(
                f"{name} row has {len(views)} views, expected {VIEWS_PER_SAMPLE}"
            )
    if cell_size < 8 or strip_height < 12:
        raise ValueError("grid cells are too small to draw")

    width = (1 + VIEWS_PER_SAMPLE) * cell_size
    height = 2 * cell_size + strip_height
    canvas = Image.new("RGBA", (width, height), CANVAS_COLOR)

    draw = ImageDraw.Draw(canvas)
    draw.rectangle([0, 0, width - 1, strip_height - 1], fill=STRIP_COLOR)
    font = ImageFont.load_default()
    labels = (
        ("Reference", 8),
        ("Option 1 (top row)", cell_size + 8),
        ("Option 2 (bottom row)", 3 * cell_size + 8),
    )
    for text, x in labels:
        box = draw.textbbox((0, 0), text, font=font)
        y = (strip_height - (box[3] - box[1])) // 2 - box[1]
        draw.text((x, y), text, fill=STRIP_TEXT_COLOR, font=font)

    ref_cell = _fit_cell(_to_pil(reference), cell_size)
    canvas.alpha_composite(ref_cell, dest=(0, strip_height + cell_size // 2))
    for col, view in enumerate(views_top):
        cell = _fit_cell(_to_pil(view), cell_size)
        canvas.alpha_composite(cell, dest=((1 + col) * cell_size, strip_height))
    for col, view in enumerate(views_bottom):
        cell = _fit_cell(_to_pil(view), cell_size)
        canvas.alpha_composite(cell, dest=((1 + col) * cell_size, strip_height + cell_size))

    return RgbaImage(np.asarray(canvas, dtype=np.uint8))


def save_png(image: RgbaImage, path: str | Path) -> None:
    """Write an image as PNG, creating parent directories as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _to_pil(image).save(path, format="PNG")
