"""Hot numeric kernels with jitted and pure-numpy implementations.

Each kernel exists twice: a loop formulation compiled with numba's
``@njit`` and a vectorized numpy fallback. The jitted path is selected
by default whenever numba imports cleanly. Setting the environment
variable ``TEXCURVE_DISABLE_NUMBA=1`` before import, or calling
:func:`set_backend` at runtime, switches to the numpy path. Both paths
must produce identical outputs; the test suite asserts bitwise equality
and ``benchmarks/bench_kernels.py`` compares their speed.

All rounding of fractional results uses half-up ``floor(x + 0.5)`` so
the two paths cannot diverge on ties.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "TEXCURVE_DISABLE_NUMBA"

#: Sobel horizontal-derivative kernel, applied as a correlation.
SOBEL_KX = np.array(
    [[-1.0, 0.0, 1.0],
     [-2.0, 0.0, 2.0],
     [-1.0, 0.0, 1.0]]
)
#: Sobel vertical-derivative kernel (transpose of ``SOBEL_KX``).
SOBEL_KY = np.array(
    [[-1.0, -2.0, -1.0],
     [0.0, 0.0, 0.0],
     [1.0, 2.0, 1.0]]
)


def _disabled_by_env() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _disabled_by_env():
        raise ImportError(f"numba disabled via {_ENV_FLAG}")
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

_backend = "numba" if NUMBA_AVAILABLE else "numpy"


def set_backend(name: str) -> None:
    """Select the active implementation, ``"numba"`` or ``"numpy"``."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise ValueError("numba backend requested but numba is unavailable")
    _backend = name


def get_backend() -> str:
    """Return the name of the active implementation."""
    return _backend


# ---------------------------------------------------------------------------
# loop formulations (jitted when numba is available)
# ---------------------------------------------------------------------------


def _luma_loops(rgba, out):
    h, w = out.shape
    for y in range(h):
        for x in range(w):
            v = (0.299 * rgba[y, x, 0] + 0.587 * rgba[y, x, 1]) + 0.114 * rgba[y, x, 2]
            out[y, x] = np.uint8(np.floor(v + 0.5))


def _hsv_loops(rgba, out):
    h, w = out.shape[0], out.shape[1]
    for y in range(h):
        for x in range(w):
            r = np.float64(rgba[y, x, 0])
            g = np.float64(rgba[y, x, 1])
            b = np.float64(rgba[y, x, 2])
            mx = max(r, g, b)
            mn = min(r, g, b)
            c = mx - mn
            if c == 0.0:
                hue = 0.0
            elif mx == r:
                hue = 60.0 * (((g - b) / c) % 6.0)
            elif mx == g:
                hue = 60.0 * ((b - r) / c + 2.0)
            else:
                hue = 60.0 * ((r - g) / c + 4.0)
            s = 0.0 if mx == 0.0 else (mx - mn) / mx
            out[y, x, 0] = np.uint8(np.floor(hue / 360.0 * 255.0 + 0.5))
            out[y, x, 1] = np.uint8(np.floor(s * 255.0 + 0.5))
            out[y, x, 2] = np.uint8(mx)


def _sobel_loops(gray, kx, ky, gx, gy, gmag):
    h, w = gray.shape
    for y in range(h):
        for x in range(w):
            sx = 0.0
            sy = 0.0
            for dy in range(-1, 2):
                yy = y + dy
                if yy < 0:
                    yy = 0
                elif yy >= h:
                    yy = h - 1
                for dx in range(-1, 2):
                    xx = x + dx
                    if xx < 0:
                        xx = 0
                    elif xx >= w:
                        xx = w - 1
                    v = np.float64(gray[yy, xx])
                    sx += kx[dy + 1, dx + 1] * v
                    sy += ky[dy + 1, dx + 1] * v
            gx[y, x] = sx
            gy[y, x] = sy
            gmag[y, x] = np.sqrt(sx * sx + sy * sy)


def _hist_loops(values, out):
    for i in range(values.size):
        out[values[i]] += 1


def _elo_pass_loops(idx_i, idx_j, outcomes, k, initial, n_methods):
    ratings = np.full(n_methods, initial)
    for t in range(idx_i.size):
        a = idx_i[t]
        b = idx_j[t]
        expected = 1.0 / (1.0 + 10.0 ** ((ratings[b] - ratings[a]) / 400.0))
        delta = k * (outcomes[t] - expected)
        ratings[a] += delta
        ratings[b] -= delta
    return ratings


if NUMBA_AVAILABLE:
    _luma_numba = _njit(cache=True)(_luma_loops)
    _hsv_numba = _njit(cache=True)(_hsv_loops)
    _sobel_numba = _njit(cache=True)(_sobel_loops)
    _hist_numba = _njit(cache=True)(_hist_loops)
    _elo_pass_numba = _njit(cache=True)(_elo_pass_loops)


# ---------------------------------------------------------------------------
# vectorized numpy formulations
# ---------------------------------------------------------------------------


def _luma_numpy(rgba):
    rgb = rgba[..., :3].astype(np.float64)
    v = (0.299 * rgb[..., 0] + 0.587 * rgb[..., 1]) + 0.114 * rgb[..., 2]
    return np.floor(v + 0.5).astype(np.uint8)


def _hsv_numpy(rgba):
    rgb = rgba[..., :3].astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    c = mx - mn
    safe_c = np.where(c > 0.0, c, 1.0)
    hue_r = 60.0 * (((g - b) / safe_c) % 6.0)
    hue_g = 60.0 * ((b - r) / safe_c + 2.0)
    hue_b = 60.0 * ((r - g) / safe_c + 4.0)
    # branch priority must match the loop formulation: gray, then r, then g
    hue = np.select([c == 0.0, mx == r, mx == g], [0.0, hue_r, hue_g], default=hue_b)
    safe_mx = np.where(mx > 0.0, mx, 1.0)
    s = np.where(mx > 0.0, (mx - mn) / safe_mx, 0.0)
    out = np.empty(rgba.shape[:2] + (3,), dtype=np.uint8)
    out[..., 0] = np.floor(hue / 360.0 * 255.0 + 0.5).astype(np.uint8)
    out[..., 1] = np.floor(s * 255.0 + 0.5).astype(np.uint8)
    out[..., 2] = mx.astype(np.uint8)
    return out


def _sobel_numpy(gray):
    p = np.pad(gray, 1, mode="edge").astype(np.float64)
    tl, tc, tr = p[:-2, :-2], p[:-2, 1:-1], p[:-2, 2:]
    ml, mr = p[1:-1, :-2], p[1:-1, 2:]
    bl, bc, br = p[2:, :-2], p[2:, 1:-1], p[2:, 2:]
    gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)
    gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)
    gmag = np.sqrt(gx * gx + gy * gy)
    return gx, gy, gmag


def _hist_numpy(values):
    return np.bincount(values, minlength=256).astype(np.int64)


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------


def luma_u8(rgba: np.ndarray) -> np.ndarray:
    """BT.601 luma of an (h, w, 4) uint8 array, rounded half-up to uint8."""
    if _backend == "numba":
        out = np.empty(rgba.shape[:2], dtype=np.uint8)
        _luma_numba(np.ascontiguousarray(rgba), out)
        return out
    return _luma_numpy(rgba)


def rgb_to_hsv_u8(rgba: np.ndarray) -> np.ndarray:
    """HSV of an (h, w, 4) uint8 array, each channel quantized to 0..255.

    Hue is computed in degrees then scaled by 255/360; saturation is
    (max - min) / max scaled by 255; value is the channel maximum.
    Alpha is ignored.
    """
    if _backend == "numba":
        out = np.empty(rgba.shape[:2] + (3,), dtype=np.uint8)
        _hsv_numba(np.ascontiguousarray(rgba), out)
        return out
    return _hsv_numpy(rgba)


def sobel_gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Correlate ``gray`` with the Sobel pair under replicate padding.

    Returns float64 arrays (gx, gy, gmag) where
    ``gmag = sqrt(gx**2 + gy**2)``.
    """
    if _backend == "numba":
        h, w = gray.shape
        gx = np.empty((h, w))
        gy = np.empty((h, w))
        gmag = np.empty((h, w))
        _sobel_numba(np.ascontiguousarray(gray), SOBEL_KX, SOBEL_KY, gx, gy, gmag)
        return gx, gy, gmag
    return _sobel_numpy(gray)


def count_values_u8(values: np.ndarray) -> np.ndarray:
    """256-bin occurrence counts (int64) of a flat uint8 array."""
    values = np.ascontiguousarray(values.reshape(-1))
    if _backend == "numba":
        out = np.zeros(256, dtype=np.int64)
        _hist_numba(values, out)
        return out
    return _hist_numpy(values)


def elo_pass(
    idx_i: np.ndarray,
    idx_j: np.ndarray,
    outcomes: np.ndarray,
    k: float,
    initial: float,
    n_methods: int,
) -> np.ndarray:
    """Sequential Elo update over one ordering of comparison records.

    ``idx_i``/``idx_j`` are int64 method indices, ``outcomes`` the score
    of method i in each record. The paired update adds ``delta`` to the
    winner side and subtracts the same ``delta`` from the other, so the
    rating sum is conserved exactly.
    """
    if _backend == "numba":
        return _elo_pass_numba(idx_i, idx_j, outcomes, k, initial, n_methods)
    return _elo_pass_loops(idx_i, idx_j, outcomes, k, initial, n_methods)
