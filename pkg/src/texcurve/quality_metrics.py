"""Scalar appearance metrics: color entropy, texture complexity, total score.

The color score is the mean Shannon entropy of the three HSV channel
histograms; the texture score is the mean Sobel gradient magnitude of
the grayscale image. The combined score weights color against texture
with a single coefficient so that both terms contribute at comparable
magnitude on typical renders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistogram, EmptySelection
from .image_core import (
    ChannelHistogram,
    RgbaImage,
    histogram,
    resolve_mask,
    sobel,
    to_grayscale,
    to_hsv,
)

DEFAULT_COLOR_WEIGHT = 35.0
DEFAULT_ENTROPY_BASE = 2.0


@dataclass(frozen=True)
class QualityScore:
    """Color, texture and combined appearance scores of one image or object."""

    c_color: float
    c_texture: float
    c_total: float
    color_weight: float = DEFAULT_COLOR_WEIGHT

    def as_dict(self) -> dict:
        return {
            "c_color": self.c_color,
            "c_texture": self.c_texture,
            "c_total": self.c_total,
        }


def channel_entropy(hist: ChannelHistogram, base: float = DEFAULT_ENTROPY_BASE) -> float:
    """Shannon entropy of one channel histogram, in units of ``log base``.

    Zero-count bins contribute nothing. For base 2 the result lies in
    [0, 8] for 256 bins. Raises
    :class:`~texcurve.errors.EmptyHistogram` when the histogram has no
    mass.
    """
    if base <= 0.0 or base == 1.0:
        raise ValueError("entropy base must be positive and not 1")
    if hist.total == 0:
        raise EmptyHistogram("cannot take entropy of an empty histogram")
    counts = hist.bins[hist.bins > 0]
    p = counts / hist.total
    if base == 2.0:
        terms = p * np.log2(p)
    else:
        terms = p * (np.log(p) / math.log(base))
    return float(-terms.sum())


def color_entropy_of_hsv(
    hsv: np.ndarray,
    mask: np.ndarray | None = None,
    base: float = DEFAULT_ENTROPY_BASE,
) -> float:
    """Mean channel entropy of a precomputed (h, w, 3) uint8 HSV array."""
    entropies = [
        channel_entropy(histogram(hsv[..., ch], mask), base=base) for ch in range(3)
    ]
    return (entropies[0] + entropies[1] + entropies[2]) / 3.0


def color_entropy(
    image: RgbaImage,
    mask: np.ndarray | None = None,
    base: float = DEFAULT_ENTROPY_BASE,
) -> float:
    """Mean Shannon entropy of the H, S and V channel histograms.

    With the default base 2 the result is bounded by [0, 8] bits: a
    uniform image scores 0, and the score grows with the diversity of
    hue, saturation and brightness over the selected pixels.
    """
    return color_entropy_of_hsv(to_hsv(image), mask=mask, base=base)


def _masked_mean(values: np.ndarray, mask: np.ndarray | None) -> float:
    if mask is None:
        return float(values.mean())
    m = np.asarray(mask, dtype=bool)
    if m.shape != values.shape:
        raise ValueError("mask shape must match image shape")
    selected = values[m]
    if selected.size == 0:
        raise EmptySelection("mask selects no pixels")
    return float(selected.mean())


def texture_complexity(image: RgbaImage, mask: np.ndarray | None = None) -> float:
    """Mean Sobel gradient magnitude of the grayscale image.

    When a mask is given, only gradient samples at selected pixels are
    averaged; the gradients themselves are always computed on the full
    image so masked and unmasked calls see identical local responses.
    """
    return _masked_mean(sobel(to_grayscale(image)).gmag, mask)


def total_score(
    c_color: float,
    c_texture: float,
    color_weight: float = DEFAULT_COLOR_WEIGHT,
) -> float:
    """Weighted combination ``color_weight * c_color + c_texture``."""
    for name, value in (("c_color", c_color), ("c_texture", c_texture)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite")
    if not math.isfinite(color_weight) or color_weight < 0.0:
        raise ValueError("color_weight must be finite and non-negative")
    return color_weight * c_color + c_texture


def score_image(
    image: RgbaImage,
    mask_mode: str = "auto",
    color_weight: float = DEFAULT_COLOR_WEIGHT,
    entropy_base: float = DEFAULT_ENTROPY_BASE,
) -> QualityScore:
    """Compute all three scores of one image under a mask mode."""
    mask = resolve_mask(image, mask_mode)
    c_color = color_entropy(image, mask=mask, base=entropy_base)
    c_texture = texture_complexity(image, mask=mask)
    return QualityScore(
        c_color=c_color,
        c_texture=c_texture,
        c_total=total_score(c_color, c_texture, color_weight),
        color_weight=color_weight,
    )
