"""Single-level 2-D Haar wavelet transform and LL-band feature extraction.

The transform is orthonormal: for each 2x2 block ``[[a, b], [c, d]]``::

    LL = (a + b + c + d) / 2      LH = (a - b + c - d) / 2
    HL = (a + b - c - d) / 2      HH = (a - b - c + d) / 2

so ``LL / 2`` is the block mean and energy is preserved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .raster import pad_reflect

__all__ = [
    "WaveletSubbands",
    "NormalizationSpec",
    "hwt_forward",
    "hwt_inverse",
    "normalize_subband",
    "mfe_extract",
    "ll_upsample",
]

STRATEGIES = ("minmax", "half", "zscore")
_ALIASES = {"half-scale": "half", "zscore-rescale": "zscore"}


@dataclass(frozen=True)
class WaveletSubbands:
    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray
    # set when an odd input had to be reflect-padded by one row/column
    padded_rows: bool = False
    padded_cols: bool = False

    def __post_init__(self):
        shapes = {np.shape(b) for b in (self.ll, self.lh, self.hl, self.hh)}
        if len(shapes) != 1:
            raise DimensionError(f"sub-bands disagree in shape: {sorted(shapes)}")


@dataclass(frozen=True)
class NormalizationSpec:
    strategy: str = "minmax"
    out_lo: float = 0.0
    out_hi: float = 255.0

    def __post_init__(self):
        strategy = _ALIASES.get(self.strategy, self.strategy)
        if strategy not in STRATEGIES:
            raise ConfigError(f"unknown normalization {self.strategy!r}; choose from {STRATEGIES}")
        object.__setattr__(self, "strategy", strategy)
        if not self.out_lo < self.out_hi:
            raise ConfigError("out_lo must be below out_hi")


def hwt_forward(img: np.ndarray) -> WaveletSubbands:
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise DimensionError(f"HWT needs a 2-D image of at least 2x2, got shape {x.shape}")
    odd_r, odd_c = x.shape[0] % 2, x.shape[1] % 2
    x = pad_reflect(x, odd_r, odd_c)
    a = x[0::2, 0::2]
    b = x[0::2, 1::2]
    c = x[1::2, 0::2]
    d = x[1::2, 1::2]
    return WaveletSubbands(
        ll=(a + b + c + d) / 2,
        lh=(a - b + c - d) / 2,
        hl=(a + b - c - d) / 2,
        hh=(a - b - c + d) / 2,
        padded_rows=bool(odd_r),
        padded_cols=bool(odd_c),
    )


def hwt_inverse(sb: WaveletSubbands) -> np.ndarray:
    """Reconstruct the image; padding added by :func:`hwt_forward` is cropped."""
    ll, lh, hl, hh = (np.asarray(b, dtype=np.float64) for b in (sb.ll, sb.lh, sb.hl, sb.hh))
    if ll.ndim != 2:
        raise DimensionError("sub-bands must be 2-D")
    h, w = ll.shape
    out = np.empty((2 * h, 2 * w))
    out[0::2, 0::2] = (ll + lh + hl + hh) / 2
    out[0::2, 1::2] = (ll - lh + hl - hh) / 2
    out[1::2, 0::2] = (ll + lh - hl - hh) / 2
    out[1::2, 1::2] = (ll - lh - hl + hh) / 2
    return out[:2 * h - sb.padded_rows, :2 * w - sb.padded_cols]


def normalize_subband(band: np.ndarray, spec: NormalizationSpec = NormalizationSpec()) -> np.ndarray:
    band = np.asarray(band, dtype=np.float64)
    if band.size == 0:
        raise DimensionError("cannot normalize an empty band")
    lo, hi = spec.out_lo, spec.out_hi
    if spec.strategy == "half":
        return band / 2
    if spec.strategy == "minmax":
        bmin, bmax = band.min(), band.max()
        if bmax == bmin:
            return np.full_like(band, (lo + hi) / 2)
        # clip guards against a last-ulp overshoot at the band maximum
        return np.clip(lo + (band - bmin) * ((hi - lo) / (bmax - bmin)), lo, hi)
    mu, sigma = band.mean(), band.std()
    if sigma == 0:
        return np.full_like(band, (lo + hi) / 2)
    z = np.clip((band - mu) / sigma, -3.0, 3.0)
    return np.clip(lo + (z + 3.0) * ((hi - lo) / 6.0), lo, hi)


def mfe_extract(patch: np.ndarray, spec: NormalizationSpec = NormalizationSpec()) -> np.ndarray:
    """Normalized LL band of ``patch``; output is half the input size."""
    return normalize_subband(hwt_forward(patch).ll, spec)


def ll_upsample(enhanced_ll: np.ndarray) -> np.ndarray:
    """Inverse HWT with zeroed detail bands (each LL value v becomes a v/2 block)."""
    ll = np.asarray(enhanced_ll, dtype=np.float64)
    zeros = np.zeros_like(ll)
    return hwt_inverse(WaveletSubbands(ll, zeros, zeros, zeros))
