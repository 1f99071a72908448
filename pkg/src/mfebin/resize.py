"""Image resampling with OpenCV-compatible kernel conventions.

Kernel methods map a destination index to the source coordinate
``src = (dst + 0.5) * scale - 0.5`` and replicate border pixels.  Nearest
neighbour picks ``floor((dst + 0.5) * scale)``; area averages the source
interval ``[dst * scale, (dst + 1) * scale)`` weighted by overlap.

Every method is separable, so resampling is ``Wy @ img @ Wx.T`` with one
weight matrix per axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

__all__ = ["ResizeMethod", "METHODS", "resize", "resize_mask", "axis_weights", "kernel_weight"]

METHODS = ("nearest", "bilinear", "bicubic", "area", "lanczos")


@dataclass(frozen=True)
class ResizeMethod:
    kind: str = "bilinear"
    bicubic_a: float = -0.75
    lanczos_taps: int = 4

    def __post_init__(self):
        if self.kind not in METHODS:
            raise ConfigError(f"unknown resize method {self.kind!r}; choose from {METHODS}")
        if not self.bicubic_a < 0:
            raise ConfigError("bicubic_a must be negative")
        if self.lanczos_taps < 2:
            raise ConfigError("lanczos_taps must be >= 2")

    @classmethod
    def coerce(cls, method) -> "ResizeMethod":
        return method if isinstance(method, cls) else cls(str(method))


def _cubic(x: np.ndarray, a: float) -> np.ndarray:
    x = np.abs(x)
    near = ((a + 2) * x - (a + 3)) * x * x + 1
    far = ((a * x - 5 * a) * x + 8 * a) * x - 4 * a
    return np.where(x <= 1, near, np.where(x < 2, far, 0.0))


def _lanczos(x: np.ndarray, lobes: int) -> np.ndarray:
    return np.where(np.abs(x) < lobes, np.sinc(x) * np.sinc(x / lobes), 0.0)


def kernel_weight(method: ResizeMethod, x):
    """Unnormalized 1-D kernel value at offset ``x`` (bilinear, bicubic, lanczos)."""
    x = np.asarray(x, dtype=np.float64)
    if method.kind == "bilinear":
        return np.clip(1 - np.abs(x), 0, None)
    if method.kind == "bicubic":
        return _cubic(x, method.bicubic_a)
    if method.kind == "lanczos":
        return _lanczos(x, method.lanczos_taps)
    raise ConfigError(f"{method.kind} is not a kernel method")


def _support(method: ResizeMethod) -> tuple[int, int]:
    """Tap offsets relative to floor(src), inclusive."""
    if method.kind == "bilinear":
        return 0, 1
    if method.kind == "bicubic":
        return -1, 2
    n = method.lanczos_taps
    return -(n - 1), n


def axis_weights(n_in: int, n_out: int, method: ResizeMethod) -> np.ndarray:
    """``(n_out, n_in)`` matrix mapping a source line onto a destination line."""
    scale = n_in / n_out
    W = np.zeros((n_out, n_in))
    dst = np.arange(n_out)
    if method.kind == "nearest":
        src = np.minimum(np.floor((dst + 0.5) * scale).astype(np.int64), n_in - 1)
        W[dst, src] = 1.0
        return W
    if method.kind == "area":
        lo = dst * scale
        hi = (dst + 1) * scale
        for d in range(n_out):
            i0 = int(math.floor(lo[d]))
            i1 = min(int(math.ceil(hi[d])), n_in)
            for i in range(i0, i1):
                W[d, i] = min(hi[d], i + 1) - max(lo[d], i)
        W /= W.sum(axis=1, keepdims=True)
        return W
    src = (dst + 0.5) * scale - 0.5
    base = np.floor(src).astype(np.int64)
    k0, k1 = _support(method)
    offsets = np.arange(k0, k1 + 1)
    taps = base[:, None] + offsets[None, :]
    w = kernel_weight(method, src[:, None] - taps)
    if method.kind == "lanczos":
        w = w / w.sum(axis=1, keepdims=True)
    cols = np.clip(taps, 0, n_in - 1)
    rows = np.broadcast_to(dst[:, None], cols.shape)
    np.add.at(W, (rows, cols), w)
    return W


def resize(img: np.ndarray, method="bilinear", out_w: int = 1, out_h: int = 1,
           clamp: bool = False) -> np.ndarray:
    """Resample a float image to ``out_w`` x ``out_h``.

    Bicubic and Lanczos may overshoot the input range; pass ``clamp=True`` to
    clip the result to ``[img.min(), img.max()]``.
    """
    method = ResizeMethod.coerce(method)
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2 or x.size == 0:
        raise DimensionError(f"expected a non-empty 2-D image, got shape {x.shape}")
    if out_w < 1 or out_h < 1:
        raise DimensionError(f"target size {out_w}x{out_h} must be at least 1x1")
    h, w = x.shape
    if method.kind == "nearest":
        out = x[_nearest_index(h, out_h)][:, _nearest_index(w, out_w)]
    else:
        # resample the offset from one source pixel so constants come back bit-exact
        ref = x.flat[0]
        out = axis_weights(h, out_h, method) @ (x - ref) @ axis_weights(w, out_w, method).T + ref
    if clamp:
        out = np.clip(out, x.min(), x.max())
    return out


def _nearest_index(n_in: int, n_out: int) -> np.ndarray:
    dst = np.arange(n_out)
    return np.minimum(np.floor((dst + 0.5) * (n_in / n_out)).astype(np.int64), n_in - 1)


def resize_mask(mask: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Nearest-neighbour resize of a boolean mask."""
    m = np.asarray(mask, dtype=bool)
    if out_w < 1 or out_h < 1:
        raise DimensionError(f"target size {out_w}x{out_h} must be at least 1x1")
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-D mask, got shape {m.shape}")
    h, w = m.shape
    if (h, w) == (out_h, out_w):
        return m.copy()
    return m[_nearest_index(h, out_h)][:, _nearest_index(w, out_w)]
