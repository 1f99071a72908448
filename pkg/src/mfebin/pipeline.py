"""Three-stage processing of document pages, plus the resampler benchmark.

Stage 1 splits a page into red/green/blue/gray planes, tiles them and (with
MFE on) reduces each tile to its normalized LL band.  Stage 2 runs an
enhancement backend per channel and merges the channels back to one
full-resolution image.  Stage 3 binarizes that image locally, binarizes a
fixed-size nearest-neighbour copy of the page globally, and ANDs the two.

Backends are classical stand-ins or external commands that exchange PNG
files, so a trained network can be plugged in without importing it here.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .binarize import ThresholdParams, binarize, binarize_global, fuse_and
from .dataset import DatasetManifest
from .errors import BackendError, ConfigError, DimensionError, MfeBinError
from .metrics import MetricsConfig, MetricsReport, evaluate_masks, psnr
from .mfe import NormalizationSpec, hwt_forward, ll_upsample, mfe_extract
from .raster import (ChannelSet, PatchGrid, RasterImage, float_to_uint8, load_image,
                     load_mask, save_image, save_mask, split_channels, stitch_patches,
                     tile_patches, to_grayscale)
from .resize import METHODS, ResizeMethod, resize, resize_mask

log = logging.getLogger(__name__)

__all__ = [
    "BackendSpec",
    "PipelineConfig",
    "StageTiming",
    "PageResult",
    "run_stage1",
    "run_stage2",
    "run_stage3",
    "run_page",
    "run_pipeline",
    "compare_resizers",
    "RESIZER_ROWS",
    "write_resizer_csv",
    "store_8bit",
    "downscale_half",
    "emit_report",
]


@dataclass(frozen=True)
class BackendSpec:
    """``identity``, ``classic`` (a thresholding method) or ``external`` command."""

    kind: str = "identity"
    role: str = "enhancement"
    params: ThresholdParams | None = None
    template: str | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "classic", "external"):
            raise ConfigError(f"unknown backend kind {self.kind!r}")
        if self.role not in ("enhancement", "binarization"):
            raise ConfigError(f"unknown backend role {self.role!r}")
        if self.kind == "classic":
            if self.role != "binarization":
                raise ConfigError("classic backends only binarize")
            if self.params is None:
                object.__setattr__(self, "params", ThresholdParams())
        if self.kind == "external":
            if not self.template or "{in}" not in self.template or "{out}" not in self.template:
                raise ConfigError("external backend template needs {in} and {out} placeholders")

    @classmethod
    def classic(cls, method: str = "sauvola", **kw) -> "BackendSpec":
        return cls("classic", "binarization", ThresholdParams(method, **kw))

    @classmethod
    def from_dict(cls, d: dict, role: str) -> "BackendSpec":
        d = dict(d)
        params = d.pop("params", None)
        if params is not None:
            params = ThresholdParams(**params)
        return cls(d.pop("kind", "identity"), d.pop("role", role), params, d.pop("template", None))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "role": self.role}
        if self.params is not None:
            d["params"] = asdict(self.params)
        if self.template is not None:
            d["template"] = self.template
        return d

    def _external(self, img: np.ndarray) -> np.ndarray:
        work = Path(tempfile.mkdtemp(prefix="mfebin-"))
        try:
            src, dst = work / "in.png", work / "out.png"
            save_image(float_to_uint8(img), src)
            cmd = shlex.split(self.template.format(**{"in": shlex.quote(str(src)),
                                                      "out": shlex.quote(str(dst))}))
            proc = subprocess.run(cmd, capture_output=True, text=True)
            if proc.returncode != 0:
                raise BackendError(f"backend exited with {proc.returncode}: {proc.stderr.strip()}")
            try:
                result = to_grayscale(load_image(dst))
            except MfeBinError as exc:
                raise BackendError(f"backend output unreadable: {exc}") from exc
        finally:
            shutil.rmtree(work, ignore_errors=True)
        if result.shape != np.shape(img):
            raise BackendError(f"backend returned {result.shape[1]}x{result.shape[0]}, "
                               f"expected {img.shape[1]}x{img.shape[0]}")
        return result

    def enhance(self, img: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return np.asarray(img, dtype=np.float64)
        if self.kind == "external":
            return self._external(img)
        raise ConfigError("classic backends cannot enhance")

    def binarize(self, img: np.ndarray) -> np.ndarray:
        if self.kind == "classic":
            return binarize(img, self.params)
        if self.kind == "external":
            return self._external(img) < 128
        return np.asarray(img) < 128


@dataclass(frozen=True)
class PipelineConfig:
    patch_size: int = 256
    mfe: bool = True
    norm: NormalizationSpec = NormalizationSpec()
    stage2: BackendSpec | dict = BackendSpec()
    stage3_local: BackendSpec = BackendSpec.classic("sauvola")
    stage3_global: BackendSpec = BackendSpec.classic("otsu")
    global_size: int = 512
    combine: str = "mean"

    def __post_init__(self):
        if self.combine not in ("mean", "sum"):
            raise ConfigError("combine must be 'mean' or 'sum'")
        if self.global_size < 1:
            raise ConfigError("global_size must be positive")
        if self.patch_size < 2 or self.patch_size % 2:
            raise ConfigError("patch_size must be even")

    def stage2_backend(self, channel: str) -> BackendSpec:
        if isinstance(self.stage2, BackendSpec):
            return self.stage2
        return self.stage2.get(channel, BackendSpec())

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        kw = {}
        for key in ("patch_size", "mfe", "global_size", "combine"):
            if key in d:
                kw[key] = d.pop(key)
        if "norm" in d:
            norm = d.pop("norm")
            kw["norm"] = NormalizationSpec(norm) if isinstance(norm, str) else NormalizationSpec(**norm)
        if "stage2" in d:
            s2 = d.pop("stage2")
            if "kind" in s2:
                kw["stage2"] = BackendSpec.from_dict(s2, "enhancement")
            else:
                kw["stage2"] = {ch: BackendSpec.from_dict(v, "enhancement") for ch, v in s2.items()}
        if "stage3_local" in d:
            kw["stage3_local"] = BackendSpec.from_dict(d.pop("stage3_local"), "binarization")
        if "stage3_global" in d:
            kw["stage3_global"] = BackendSpec.from_dict(d.pop("stage3_global"), "binarization")
        if d:
            raise ConfigError(f"unknown config keys: {sorted(d)}")
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        if isinstance(self.stage2, BackendSpec):
            s2 = self.stage2.to_dict()
        else:
            s2 = {ch: b.to_dict() for ch, b in self.stage2.items()}
        return {
            "patch_size": self.patch_size,
            "mfe": self.mfe,
            "norm": asdict(self.norm),
            "stage2": s2,
            "stage3_local": self.stage3_local.to_dict(),
            "stage3_global": self.stage3_global.to_dict(),
            "global_size": self.global_size,
            "combine": self.combine,
        }


@dataclass
class StageTiming:
    stage1: float = 0.0
    stage2: float = 0.0
    stage3_local: float = 0.0
    stage3_global: float = 0.0
    fuse: float = 0.0

    @property
    def total(self) -> float:
        return self.stage1 + self.stage2 + self.stage3_local + self.stage3_global + self.fuse

    def __iadd__(self, other: "StageTiming") -> "StageTiming":
        for name in ("stage1", "stage2", "stage3_local", "stage3_global", "fuse"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self


@dataclass
class PageResult:
    b_local: np.ndarray
    b_global: np.ndarray
    b_final: np.ndarray
    enhanced: np.ndarray
    timing: StageTiming
    wall: float


def run_stage1(img: RasterImage, cfg: PipelineConfig) -> dict[str, PatchGrid]:
    """Per-channel patch grids; with MFE on each tile is its normalized LL band."""
    channels: ChannelSet = split_channels(img)
    grids = {}
    for name, plane in zip(ChannelSet.names, channels.planes()):
        grid = tile_patches(plane, cfg.patch_size)
        if cfg.mfe:
            grid = grid.map(lambda p: mfe_extract(p, cfg.norm))
        grids[name] = grid
    return grids


def run_stage2(grids: dict[str, PatchGrid], cfg: PipelineConfig) -> np.ndarray:
    """Enhance every channel tile, merge channels and restore full resolution.

    With MFE on, a merged tile is in gray-level units at half size; it is
    taken back to full size as an LL band of twice its value, with the detail
    bands zeroed, so each value ``v`` becomes a 2x2 block of ``v``.
    """
    enhanced = {}
    for name, grid in grids.items():
        backend = cfg.stage2_backend(name)
        enhanced[name] = grid.map(lambda p, b=backend: _checked_enhance(b, p))
    ref = next(iter(grids.values()))
    merged = []
    for i, (r, c, _) in enumerate(ref.patches):
        stack = np.stack([enhanced[n].patches[i][2] for n in grids])
        tile = stack.mean(axis=0) if cfg.combine == "mean" else stack.sum(axis=0)
        tile = np.clip(tile, 0, 255)
        if cfg.mfe:
            tile = ll_upsample(2.0 * tile)
        merged.append((r, c, tile))
    out = PatchGrid(ref.patch_size, ref.rows, ref.cols, ref.pad_right, ref.pad_bottom, merged)
    return stitch_patches(out)


def _checked_enhance(backend: BackendSpec, patch: np.ndarray) -> np.ndarray:
    out = backend.enhance(patch)
    if out.shape != patch.shape:
        raise BackendError(f"enhancement changed tile shape {patch.shape} -> {out.shape}")
    return out


def _global_branch(original: RasterImage, cfg: PipelineConfig) -> np.ndarray:
    h, w = original.shape
    small = resize(to_grayscale(original), "nearest", cfg.global_size, cfg.global_size)
    return resize_mask(cfg.stage3_global.binarize(small), w, h)


def run_stage3(enhanced: np.ndarray, original: RasterImage, cfg: PipelineConfig,
               timing: StageTiming | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if np.shape(enhanced) != original.shape:
        raise DimensionError(f"enhanced image {np.shape(enhanced)} does not match page {original.shape}")
    timing = timing if timing is not None else StageTiming()
    t0 = time.perf_counter()
    b_local = cfg.stage3_local.binarize(enhanced)
    t1 = time.perf_counter()
    b_global = _global_branch(original, cfg)
    t2 = time.perf_counter()
    b_final = fuse_and(b_local, b_global)
    t3 = time.perf_counter()
    timing.stage3_local += t1 - t0
    timing.stage3_global += t2 - t1
    timing.fuse += t3 - t2
    return b_local, b_global, b_final


def run_page(img: RasterImage, cfg: PipelineConfig) -> PageResult:
    timing = StageTiming()
    start = time.perf_counter()
    grids = run_stage1(img, cfg)
    t1 = time.perf_counter()
    enhanced = run_stage2(grids, cfg)
    t2 = time.perf_counter()
    timing.stage1, timing.stage2 = t1 - start, t2 - t1
    b_local, b_global, b_final = run_stage3(enhanced, img, cfg, timing)
    wall = time.perf_counter() - start
    return PageResult(b_local, b_global, b_final, enhanced, timing, wall)


def run_pipeline(manifest: DatasetManifest, cfg: PipelineConfig, out,
                 metrics_cfg: MetricsConfig = MetricsConfig()
                 ) -> tuple[list[MetricsReport], StageTiming, list[tuple[str, str]]]:
    """Process every page, write ``out/<page>.png`` masks and score them.

    A failing page is logged and listed in the returned failures; the run
    carries on with the remaining pages.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    reports, failures, timing = [], [], StageTiming()
    for inp, gt_path, pid in manifest.pairs:
        try:
            img = load_image(inp)
            result = run_page(img, cfg)
            save_mask(result.b_final, out / f"{pid}.png")
            timing += result.timing
            reports.append(evaluate_masks(result.b_final, load_mask(gt_path), metrics_cfg, name=pid))
        except Exception as exc:  # one bad page must not sink the run
            log.warning("page %s failed: %s", pid, exc)
            failures.append((pid, f"{type(exc).__name__}: {exc}"))
    return reports, timing, failures


# Row order and labels of the resampler comparison table.
RESIZER_ROWS = (
    ("Bicubic", "bicubic"),
    ("Bilinear", "bilinear"),
    ("Area", "area"),
    ("Nearest", "nearest"),
    ("Lanczos", "lanczos"),
    ("HWT", "hwt"),
    ("Ours", "hwt-norm"),
)


def downscale_half(gray: np.ndarray, method: str, norm: NormalizationSpec = NormalizationSpec()) -> np.ndarray:
    """Half-size version of an even-sized gray image by ``method``."""
    h, w = gray.shape
    if method == "hwt":
        return hwt_forward(gray).ll
    if method == "hwt-norm":
        return mfe_extract(gray, norm)
    if method not in METHODS:
        raise ConfigError(f"unknown downscale method {method!r}")
    return resize(gray, ResizeMethod(method), w // 2, h // 2)


QUANTIZE_MODES = ("clamp", "wrap", "none")


def store_8bit(values: np.ndarray, mode: str = "clamp") -> np.ndarray:
    """Map a resampled image onto 0..255 the way 8-bit storage would.

    ``clamp`` saturates, ``wrap`` keeps the low byte of the rounded value
    (unsigned overflow), ``none`` rescales the value range affinely onto
    0..255 so nothing is lost.
    """
    if mode == "clamp":
        return float_to_uint8(values)
    if mode == "wrap":
        return (np.rint(values).astype(np.int64) % 256).astype(np.uint8)
    if mode == "none":
        lo, hi = float(values.min()), float(values.max())
        if hi == lo:
            return np.full(values.shape, 127.5)
        return (values - lo) * (255.0 / (hi - lo))
    raise ConfigError(f"unknown quantize mode {mode!r}; choose from {QUANTIZE_MODES}")


def _psnr_pair(small: np.ndarray, gt_small: np.ndarray, quantize: str) -> float:
    return psnr(binarize_global(store_8bit(small, quantize)), gt_small)


def _patch_psnrs(small: np.ndarray, gt_small: np.ndarray, quantize: str, size: int) -> list[float]:
    vals = []
    ig, gg = tile_patches(small, size), tile_patches(gt_small, size)
    for (_, _, ip), (_, _, gp) in zip(ig.patches, gg.patches):
        vals.append(_psnr_pair(ip, gp, quantize))
    return vals


def compare_resizers(manifests: DatasetManifest | Sequence[DatasetManifest],
                     methods: Sequence[str] = tuple(m for _, m in RESIZER_ROWS),
                     out=None, quantize: str = "clamp", unit: str = "page",
                     patch_size: int = 128, norm: NormalizationSpec = NormalizationSpec()) -> dict:
    """PSNR of Otsu masks of half-size images against half-size ground truth.

    Half-size images pass through :func:`store_8bit` with ``quantize`` before
    Otsu.  ``unit="page"`` scores whole pages; ``unit="patch"`` scores each
    ``patch_size`` tile of the half-size page separately and drops tiles with
    a perfect (infinite) score from the mean.  Returns
    ``{"datasets": [...], "rows": {method: {dataset: mean, "mean": mean}}}``
    and writes ``out`` as CSV when given.
    """
    if isinstance(manifests, DatasetManifest):
        manifests = [manifests]
    if unit not in ("page", "patch"):
        raise ConfigError("unit must be 'page' or 'patch'")
    if quantize not in QUANTIZE_MODES:
        raise ConfigError(f"unknown quantize mode {quantize!r}")
    per = {m: {mf.name: [] for mf in manifests} for m in methods}
    for mf in manifests:
        for inp, gt_path, _ in mf.pairs:
            gray = to_grayscale(load_image(inp))
            gt = load_mask(gt_path)
            h, w = gray.shape
            gray, gt = gray[:h - h % 2, :w - w % 2], gt[:h - h % 2, :w - w % 2]
            gt_small = resize_mask(gt, gt.shape[1] // 2, gt.shape[0] // 2)
            for m in methods:
                small = downscale_half(gray, m, norm)
                if unit == "page":
                    per[m][mf.name].append(_psnr_pair(small, gt_small, quantize))
                else:
                    per[m][mf.name].extend(
                        v for v in _patch_psnrs(small, gt_small, quantize, patch_size) if math.isfinite(v))
    rows = {}
    for m in methods:
        row = {name: _mean(vals) for name, vals in per[m].items()}
        row["mean"] = _mean([v for vals in per[m].values() for v in vals])
        rows[m] = row
    table = {"datasets": [mf.name for mf in manifests], "rows": rows}
    if out is not None:
        write_resizer_csv(table, out)
    return table


def _mean(vals: Sequence[float]) -> float:
    return float(np.mean(vals)) if len(vals) else math.nan


def write_resizer_csv(table: dict, path) -> None:
    labels = {m: label for label, m in RESIZER_ROWS}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Method", *table["datasets"], "Mean Values"])
        for m, row in table["rows"].items():
            writer.writerow([labels.get(m, m), *(_fmt(row[d]) for d in table["datasets"]), _fmt(row["mean"])])


def _fmt(v: float | None, digits: int = 2) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "--"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{digits}f}"


REPORT_COLUMNS = ("file", "fm", "pfm", "psnr_db", "drd", "asm")


def _mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    def avg(attr):
        vals = [getattr(r, attr) for r in reports if getattr(r, attr) is not None]
        return float(np.mean(vals)) if vals else None

    return MetricsReport(avg("fm"), avg("pfm"), avg("psnr"), avg("drd"), avg("asm"), name="mean")


def emit_report(reports: Sequence[MetricsReport], timing: StageTiming | None, fmt: str, path) -> None:
    """Write per-page scores as CSV or an aligned text table.

    A ``mean`` row follows when there is more than one page.
    """
    rows = list(reports)
    if len(rows) > 1:
        rows.append(_mean_report(rows))
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_COLUMNS)
            for r in rows:
                writer.writerow([r.name, _fmt(r.fm), _fmt(r.pfm), _fmt(r.psnr), _fmt(r.drd), _fmt(r.asm)])
        return
    if fmt != "text":
        raise ConfigError(f"unknown report format {fmt!r}")
    header = ("File", "FM", "p-FM", "PSNR", "DRD", "ASM")
    body = [(r.name, _fmt(r.fm), _fmt(r.pfm),
             _fmt(r.psnr) + ("dB" if r.psnr is not None and math.isfinite(r.psnr) else ""),
             _fmt(r.drd), _fmt(r.asm)) for r in rows]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(widths[0]) if i == 0 else cell.rjust(widths[i])
                       for i, cell in enumerate(row)) for row in [header, *body]]
    if timing is not None:
        lines.append("")
        lines.append("Inference time: " + ", ".join(
            f"{name} {getattr(timing, name):.3f}s"
            for name in ("stage1", "stage2", "stage3_local", "stage3_global", "fuse"))
            + f", total {timing.total:.3f}s")
    Path(path).write_text("\n".join(lines) + "\n")
