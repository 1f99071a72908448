"""Global (Otsu) and local (Niblack, Sauvola) thresholding and mask fusion.

A pixel is text when its value is less than or equal to the threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .raster import float_to_uint8

__all__ = [
    "ThresholdParams",
    "otsu_threshold",
    "binarize_global",
    "binarize_local",
    "binarize",
    "window_sums",
    "local_threshold_from_sums",
    "fuse_and",
]

LOCAL_METHODS = ("niblack", "sauvola")
_DEFAULT_K = {"niblack": -0.2, "sauvola": 0.5, "otsu": 0.0}


@dataclass(frozen=True)
class ThresholdParams:
    method: str = "sauvola"
    window: int = 25
    k: float | None = None
    R: float = 128.0

    def __post_init__(self):
        if self.method not in ("otsu",) + LOCAL_METHODS:
            raise ConfigError(f"unknown threshold method {self.method!r}")
        if self.k is None:
            object.__setattr__(self, "k", _DEFAULT_K[self.method])
        if self.method in LOCAL_METHODS and (self.window < 3 or self.window % 2 == 0):
            raise ConfigError(f"window must be odd and >= 3, got {self.window}")


def _histogram(img: np.ndarray) -> np.ndarray:
    return np.bincount(float_to_uint8(img).ravel(), minlength=256)


def otsu_threshold(img: np.ndarray) -> int:
    """Threshold maximising between-class variance over the 256-bin histogram.

    The search runs in exact integer arithmetic so ties resolve to the
    smallest threshold deterministically.  A constant image returns
    ``max(value - 1, 0)``.
    """
    hist = _histogram(img)
    levels = np.nonzero(hist)[0]
    if len(levels) == 1:
        return max(int(levels[0]) - 1, 0)
    counts = [int(c) for c in hist]
    n_total = sum(counts)
    s_total = sum(i * c for i, c in enumerate(counts))
    best_t, best_num, best_den = 0, -1, 1
    n0 = s0 = 0
    # sigma_b^2(t) = (N*S0 - n0*S)^2 / (n0 * n1 * N^2); N^2 is common to all t
    for t in range(255):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = n_total - n0
        if n0 == 0 or n1 == 0:
            num, den = 0, 1
        else:
            diff = n_total * s0 - n0 * s_total
            num, den = diff * diff, n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def binarize_global(img: np.ndarray) -> np.ndarray:
    """Otsu mask over the 8-bit-quantized image; a constant image has no text."""
    q = float_to_uint8(img)
    if q.min() == q.max():
        return np.zeros(q.shape, dtype=bool)
    return q <= otsu_threshold(q)


def window_sums(img: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Windowed sum and sum of squares, reflect-padded, via integral images.

    Integer-valued images accumulate in int64, which keeps the four-corner
    subtraction exact.  Other inputs are shifted by their mean first; the
    shift is returned and the sums refer to the shifted values.
    """
    x = np.asarray(img, dtype=np.float64)
    exact = bool(np.all(x == np.rint(x))) and np.abs(x).max(initial=0) < 2 ** 20
    r = window // 2
    p = np.pad(x, r, mode="reflect")
    h, w = x.shape
    if exact:
        p = p.astype(np.int64)
        shift = 0.0
    else:
        shift = float(x.mean())
        p = p - shift

    def boxed(a):
        ii = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=a.dtype)
        ii[1:, 1:] = a.cumsum(0).cumsum(1)
        return ii[window:window + h, window:window + w] - ii[:h, window:window + w] \
            - ii[window:window + h, :w] + ii[:h, :w]

    return boxed(p), boxed(p * p), shift


def local_threshold_from_sums(s1, s2, n: int, params: ThresholdParams,
                              shift: float = 0.0) -> np.ndarray:
    """Per-pixel Niblack/Sauvola threshold from window sums over ``n`` pixels.

    ``s1``/``s2`` may be sums of values offset by ``-shift``.
    """
    mean = s1 / n + shift
    var = np.maximum((n * s2 - s1 * s1) / (n * n), 0.0)
    std = np.sqrt(var)
    if params.method == "niblack":
        return mean + params.k * std
    return mean * (1 + params.k * (std / params.R - 1))


def binarize_local(img: np.ndarray, params: ThresholdParams = ThresholdParams()) -> np.ndarray:
    if params.method not in LOCAL_METHODS:
        raise ConfigError(f"{params.method} is not a local method")
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError("expected a 2-D image")
    if min(x.shape) < 2:
        raise DimensionError(f"image {x.shape[1]}x{x.shape[0]} cannot be reflect-padded")
    s1, s2, shift = window_sums(x, params.window)
    return x <= local_threshold_from_sums(s1, s2, params.window ** 2, params, shift)


def binarize(img: np.ndarray, params: ThresholdParams) -> np.ndarray:
    if params.method == "otsu":
        return binarize_global(img)
    return binarize_local(img, params)


def fuse_and(local: np.ndarray, global_: np.ndarray) -> np.ndarray:
    a, b = np.asarray(local, dtype=bool), np.asarray(global_, dtype=bool)
    if a.shape != b.shape:
        raise DimensionError(f"mask shapes differ: {a.shape} vs {b.shape}")
    return a & b
