"""DIBCO evaluation measures: FM, pseudo-FM, PSNR, DRD and the average score.

All functions take boolean masks with ``True`` marking text, the positive
class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import DimensionError, EmptyGroundTruth, UniformGroundTruth
from .raster import load_mask

__all__ = [
    "ConfusionCounts",
    "MetricsConfig",
    "MetricsReport",
    "confusion_counts",
    "f_measure",
    "skeletonize",
    "pseudo_f_measure",
    "psnr",
    "nubn_count",
    "drd_weights",
    "drd",
    "asm",
    "evaluate_masks",
    "evaluate_pair",
]

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsConfig:
    psnr_peak: float = 1.0
    drd_window: int = 5
    drd_block: int = 8

    def __post_init__(self):
        if self.psnr_peak <= 0:
            raise ValueError("psnr_peak must be positive")
        if self.drd_window < 3 or self.drd_window % 2 == 0:
            raise ValueError("drd_window must be odd and >= 3")
        if self.drd_block < 2:
            raise ValueError("drd_block must be >= 2")


@dataclass
class MetricsReport:
    """Scores for one prediction. ``drd``/``asm`` are None when undefined."""

    fm: float | None
    pfm: float | None
    psnr: float
    drd: float | None
    asm: float | None
    name: str = ""
    flags: list[str] = field(default_factory=list)


def _pair(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p, g = np.asarray(pred, dtype=bool), np.asarray(gt, dtype=bool)
    if p.shape != g.shape:
        raise DimensionError(f"prediction is {p.shape[::-1]} but ground truth is {g.shape[::-1]}")
    return p, g


def confusion_counts(pred, gt) -> ConfusionCounts:
    p, g = _pair(pred, gt)
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    return ConfusionCounts(tp, fp, fn, p.size - tp - fp - fn)


def _f(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 100.0 * 2 * precision * recall / (precision + recall)


def f_measure(c: ConfusionCounts) -> float:
    if c.tp + c.fn == 0:
        raise EmptyGroundTruth("ground truth contains no text pixels")
    if c.tp == 0:
        return 0.0
    return _f(c.tp / (c.tp + c.fp), c.tp / (c.tp + c.fn))


def skeletonize(gt) -> np.ndarray:
    """Zhang-Suen skeleton of the text region.

    Zhang-Suen erases some small components outright (a 2x2 square vanishes),
    so every component left without a skeleton pixel keeps the pixel nearest
    its centroid.
    """
    g = np.asarray(gt, dtype=bool)
    skel = kernels.zhang_suen(g.astype(np.uint8)).astype(bool)
    labels, n = ndimage.label(g, structure=_EIGHT)
    if n == 0:
        return skel
    hit = np.zeros(n + 1, dtype=bool)
    hit[labels[skel]] = True
    missing = np.nonzero(~hit[1:])[0] + 1
    for lab in missing:
        ys, xs = np.nonzero(labels == lab)
        d = (ys - ys.mean()) ** 2 + (xs - xs.mean()) ** 2
        i = int(np.argmin(d))
        skel[ys[i], xs[i]] = True
    return skel


def pseudo_f_measure(pred, gt, skeleton=None) -> float:
    """F-measure with recall measured against the skeletonized ground truth."""
    p, g = _pair(pred, gt)
    if not g.any():
        raise EmptyGroundTruth("ground truth contains no text pixels")
    sk = skeletonize(g) if skeleton is None else np.asarray(skeleton, dtype=bool)
    hits = np.count_nonzero(p & g)
    predicted = np.count_nonzero(p)
    precision = hits / predicted if predicted else 0.0
    pseudo_recall = np.count_nonzero(p & sk) / np.count_nonzero(sk)
    return _f(precision, pseudo_recall)


def psnr(pred, gt, cfg: MetricsConfig = MetricsConfig()) -> float:
    """Peak signal-to-noise ratio of {0, 1} masks; ``inf`` when they agree."""
    p, g = _pair(pred, gt)
    mse = np.count_nonzero(p != g) / p.size
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(cfg.psnr_peak ** 2 / mse)


def nubn_count(gt, block: int = 8) -> int:
    """Blocks of ``block`` x ``block`` (edge remnants included) holding both classes."""
    g = np.asarray(gt, dtype=bool)
    h, w = g.shape
    rows, cols = -(-h // block), -(-w // block)
    padded_text = np.zeros((rows * block, cols * block), dtype=np.int64)
    padded_cnt = np.zeros_like(padded_text)
    padded_text[:h, :w] = g
    padded_cnt[:h, :w] = 1
    text = padded_text.reshape(rows, block, cols, block).sum(axis=(1, 3))
    size = padded_cnt.reshape(rows, block, cols, block).sum(axis=(1, 3))
    return int(np.count_nonzero((text > 0) & (text < size)))


def drd_weights(window: int = 5) -> np.ndarray:
    """Normalized reciprocal-distance weights, zero at the centre."""
    r = window // 2
    i, j = np.mgrid[-r:r + 1, -r:r + 1]
    dist = np.hypot(i, j)
    w = np.divide(1.0, dist, out=np.zeros_like(dist), where=dist > 0)
    return w / w.sum()


def drd(pred, gt, cfg: MetricsConfig = MetricsConfig()) -> float:
    p, g = _pair(pred, gt)
    nubn = nubn_count(g, cfg.drd_block)
    if nubn == 0:
        raise UniformGroundTruth("ground truth has no non-uniform blocks")
    r = cfg.drd_window // 2
    mode = "reflect" if min(g.shape) > 1 else "symmetric"
    g_pad = np.pad(g.astype(np.uint8), r, mode=mode)
    total = kernels.drd_flip_sum(g_pad, p.astype(np.uint8), drd_weights(cfg.drd_window))
    return total / nubn


def asm(fm: float, pfm: float, psnr_db: float, drd_value: float) -> float:
    """Average score: mean of FM, p-FM, PSNR and (100 - DRD)."""
    return (fm + pfm + psnr_db + (100.0 - drd_value)) / 4.0


def evaluate_masks(pred, gt, cfg: MetricsConfig = MetricsConfig(), name: str = "") -> MetricsReport:
    """All five scores; undefined ones are None and named in ``flags``."""
    p, g = _pair(pred, gt)
    flags = []
    try:
        fm = f_measure(confusion_counts(p, g))
        pfm = pseudo_f_measure(p, g)
    except EmptyGroundTruth:
        fm = pfm = None
        flags.append("EmptyGroundTruth")
    peak = psnr(p, g, cfg)
    if math.isinf(peak):
        flags.append("InfinitePsnr")
    try:
        d = drd(p, g, cfg)
    except UniformGroundTruth:
        d = None
        flags.append("UniformGroundTruth")
    score = None
    if fm is not None and d is not None:
        score = asm(fm, pfm, peak, d)
    return MetricsReport(fm, pfm, peak, d, score, name, flags)


def evaluate_pair(pred_path, gt_path, cfg: MetricsConfig = MetricsConfig()) -> MetricsReport:
    return evaluate_masks(load_mask(pred_path), load_mask(gt_path), cfg, name=Path(pred_path).name)
