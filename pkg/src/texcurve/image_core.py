"""Pixel-level primitives: decoding, color conversion, histograms, gradients.

Every scoring operation in the package is built on the small set of
array wrappers and pure functions defined here. Images are 8-bit RGBA
throughout; conversions quantize back to uint8 with half-up rounding so
results are exactly reproducible across machines.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import kernels
from .errors import DecodeError, EmptySelection

SUPPORTED_FORMATS = ("PNG", "JPEG")

MASK_MODES = ("auto", "alpha", "none")


@dataclass(frozen=True, eq=False)
class RgbaImage:
    """8-bit RGBA raster of shape (height, width, 4), treated as immutable."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if not isinstance(p, np.ndarray) or p.ndim != 3 or p.shape[2] != 4:
            raise ValueError("pixels must be an (h, w, 4) array")
        if p.dtype != np.uint8:
            raise ValueError("pixels must be uint8")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def alpha(self) -> np.ndarray:
        return self.pixels[..., 3]


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Single-channel 8-bit raster of shape (height, width)."""

    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 2 or v.dtype != np.uint8:
            raise ValueError("values must be an (h, w) uint8 array")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")


@dataclass(frozen=True, eq=False)
class ChannelHistogram:
    """Occurrence counts of one 8-bit channel over a pixel selection."""

    bins: np.ndarray
    total: int

    def __post_init__(self):
        b = self.bins
        if not isinstance(b, np.ndarray) or b.shape != (256,):
            raise ValueError("bins must have shape (256,)")
        if b.dtype != np.int64:
            raise ValueError("bins must be int64")
        if (b < 0).any():
            raise ValueError("bin counts must be non-negative")
        if int(b.sum()) != self.total:
            raise ValueError("total must equal the sum of bins")

    def probabilities(self) -> np.ndarray:
        """Normalized bin frequencies; requires a non-empty histogram."""
        if self.total == 0:
            raise EmptySelection("histogram has no mass")
        return self.bins / self.total


@dataclass(frozen=True, eq=False)
class GradientField:
    """Sobel responses of a grayscale image: gx, gy and their magnitude."""

    gx: np.ndarray
    gy: np.ndarray
    gmag: np.ndarray

    def __post_init__(self):
        for name in ("gx", "gy", "gmag"):
            arr = getattr(self, name)
            if not isinstance(arr, np.ndarray) or arr.ndim != 2 or arr.dtype != np.float64:
                raise ValueError(f"{name} must be an (h, w) float64 array")
        if not (self.gx.shape == self.gy.shape == self.gmag.shape):
            raise ValueError("gradient fields must share one shape")


def decode_image(data: bytes) -> RgbaImage:
    """Decode PNG or JPEG bytes into an :class:`RgbaImage`.

    Other container formats and malformed or truncated payloads raise
    :class:`~texcurve.errors.DecodeError`.
    """
    try:
        img = Image.open(io.BytesIO(data))
        if img.format not in SUPPORTED_FORMATS:
            raise DecodeError(f"unsupported image format: {img.format}")
        arr = np.asarray(img.convert("RGBA"), dtype=np.uint8)
    except DecodeError:
        raise
    except Exception as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    return RgbaImage(arr)


def load_image(path) -> RgbaImage:
    """Read and decode one image file; errors carry the offending path."""
    try:
        data = open(path, "rb").read()
    except OSError as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    try:
        return decode_image(data)
    except DecodeError as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def to_grayscale(image: RgbaImage) -> GrayImage:
    """BT.601 luma, ``round(0.299 R + 0.587 G + 0.114 B)``, alpha ignored."""
    return GrayImage(kernels.luma_u8(image.pixels))


def to_hsv(image: RgbaImage) -> np.ndarray:
    """Per-pixel HSV as an (h, w, 3) uint8 array, each channel in 0..255."""
    return kernels.rgb_to_hsv_u8(image.pixels)


def alpha_mask(image: RgbaImage) -> np.ndarray:
    """Boolean (h, w) mask selecting pixels with non-zero alpha."""
    return image.alpha > 0


def resolve_mask(image: RgbaImage, mode: str = "auto") -> np.ndarray | None:
    """Materialize the pixel selection for one of the mask modes.

    ``"none"`` selects everything, ``"alpha"`` selects non-transparent
    pixels, and ``"auto"`` applies the alpha mask only when the image
    actually uses transparency.
    """
    if mode not in MASK_MODES:
        raise ValueError(f"unknown mask mode {mode!r}")
    if mode == "none":
        return None
    if mode == "alpha":
        return alpha_mask(image)
    if (image.alpha < 255).any():
        return alpha_mask(image)
    return None


def histogram(channel: np.ndarray, mask: np.ndarray | None = None) -> ChannelHistogram:
    """256-bin histogram of a uint8 channel, optionally restricted by mask.

    Raises :class:`~texcurve.errors.EmptySelection` when the mask leaves
    no pixels.
    """
    if channel.dtype != np.uint8:
        raise ValueError("channel must be uint8")
    flat = channel.reshape(-1)
    if mask is not None:
        m = np.asarray(mask, dtype=bool).reshape(-1)
        if m.shape != flat.shape:
            raise ValueError("mask shape must match channel shape")
        flat = flat[m]
    if flat.size == 0:
        raise EmptySelection("selection contains no pixels")
    bins = kernels.count_values_u8(flat)
    return ChannelHistogram(bins=bins, total=int(flat.size))


def sobel(gray: GrayImage) -> GradientField:
    """Sobel gradients of a grayscale image under replicate edge padding."""
    gx, gy, gmag = kernels.sobel_gradients(gray.values)
    return GradientField(gx=gx, gy=gy, gmag=gmag)
