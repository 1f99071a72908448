"""Dataset manifests, cross-validation folds and training-set augmentation."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionError, IoError, MissingGtError
from .raster import load_image, save_image, tile_patches, to_grayscale
from .resize import resize, resize_mask

log = logging.getLogger(__name__)

__all__ = [
    "DatasetManifest",
    "FoldSpec",
    "AugmentConfig",
    "ingest_manifest",
    "make_folds",
    "load_split_file",
    "augment_patch_set",
    "augment_global_set",
    "PATCH_COLUMNS",
]

IMAGE_SUFFIXES = {".png", ".bmp", ".tif", ".tiff", ".jpg", ".jpeg"}
PATCH_COLUMNS = ("source-page", "scale", "rotation", "row", "col", "input-path", "gt-path")


@dataclass
class DatasetManifest:
    name: str
    pairs: list[tuple[Path, Path, str]] = field(default_factory=list)

    @property
    def page_ids(self) -> list[str]:
        return [pid for _, _, pid in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)

    def subset(self, page_ids) -> "DatasetManifest":
        keep = set(page_ids)
        return DatasetManifest(self.name, [p for p in self.pairs if p[2] in keep])


@dataclass(frozen=True)
class FoldSpec:
    k: int
    assignment: dict[str, int]

    def test_pages(self, fold: int) -> list[str]:
        return sorted(p for p, f in self.assignment.items() if f == fold)

    def train_pages(self, fold: int) -> list[str]:
        return sorted(p for p, f in self.assignment.items() if f != fold)


@dataclass(frozen=True)
class AugmentConfig:
    scales: tuple[float, ...] = (0.75, 1.0, 1.25, 1.5)
    patch_rotation: int = 270
    patch_size: int = 256
    global_size: int = 512
    global_flips: bool = True
    global_rotations: tuple[int, ...] = (90, 180, 270)

    def __post_init__(self):
        if any(s <= 0 for s in self.scales):
            raise ConfigError("scales must be positive")
        if any(r % 90 for r in (self.patch_rotation, *self.global_rotations)):
            raise ConfigError("rotations must be multiples of 90 degrees")


def _images(folder: Path) -> dict[str, Path]:
    return {p.stem: p for p in sorted(folder.iterdir()) if p.suffix.lower() in IMAGE_SUFFIXES}


def ingest_manifest(root, name: str | None = None, check_dims: bool = True) -> DatasetManifest:
    """Pair ``root/inputs/*`` with ``root/gt/*`` by file stem."""
    root = Path(root)
    inp_dir, gt_dir = root / "inputs", root / "gt"
    if not inp_dir.is_dir() or not gt_dir.is_dir():
        raise IoError(f"{root} must contain 'inputs/' and 'gt/' directories")
    inputs, gts = _images(inp_dir), _images(gt_dir)
    pairs = []
    for stem in sorted(inputs):
        if stem not in gts:
            raise MissingGtError(f"no ground truth for input {stem!r}")
        pair = (inputs[stem], gts[stem], stem)
        if check_dims:
            a, b = load_image(pair[0]).shape, load_image(pair[1]).shape
            if a != b:
                raise DimensionError(f"pair {stem!r}: input is {a[1]}x{a[0]}, gt is {b[1]}x{b[0]}")
        pairs.append(pair)
    return DatasetManifest(name or root.name, pairs)


def make_folds(m: DatasetManifest, k: int, seed: int = 0, split: dict[str, int] | None = None) -> FoldSpec:
    """Assign pages to ``k`` folds.

    ``split`` (page-id -> fold) reproduces a fixed partition.
    With ``k`` equal to the page count the folds are leave-one-out in page
    order; otherwise pages are shuffled with ``seed`` and dealt into
    near-equal folds.
    """
    ids = m.page_ids
    if split is not None:
        if set(split) != set(ids):
            raise ConfigError("split file does not cover exactly the manifest pages")
        folds = sorted(set(split.values()))
        if folds != list(range(len(folds))):
            raise ConfigError("split fold indices must be 0..k-1")
        return FoldSpec(len(folds), dict(split))
    if not 1 <= k <= len(ids):
        raise ConfigError(f"cannot make {k} folds from {len(ids)} pages")
    if k == len(ids):
        return FoldSpec(k, {pid: i for i, pid in enumerate(sorted(ids))})
    order = np.random.default_rng(seed).permutation(len(ids))
    assignment = {}
    for fold, chunk in enumerate(np.array_split(order, k)):
        for i in chunk:
            assignment[ids[i]] = fold
    return FoldSpec(k, assignment)


def load_split_file(path) -> dict[str, int]:
    """Read a ``page_id,fold`` CSV (header optional)."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0] == "page_id":
                continue
            out[row[0].strip()] = int(row[1])
    return out


def _scale_pair(img: np.ndarray, gt: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
    h, w = gt.shape
    nw, nh = max(1, round(w * s)), max(1, round(h * s))
    if (nw, nh) == (w, h):
        return img, gt
    if img.ndim == 2:
        out = resize(img, "bilinear", nw, nh)
    else:
        out = np.stack([resize(img[..., c], "bilinear", nw, nh) for c in range(img.shape[2])], -1)
    return np.rint(np.clip(out, 0, 255)).astype(np.uint8), resize_mask(gt, nw, nh)


def _gt_to_png(mask: np.ndarray) -> np.ndarray:
    return np.where(mask, 0, 255).astype(np.uint8)


def augment_patch_set(m: DatasetManifest, cfg: AugmentConfig, out) -> int:
    """Scaled and rotated 256x256 training patches with aligned GT patches.

    Writes ``inputs/``, ``gt/`` and a ``patches.csv`` sidecar under ``out``
    and returns the number of patches.
    """
    out = Path(out)
    (out / "inputs").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    rotations = sorted({0, cfg.patch_rotation % 360})
    rows = []
    for inp_path, gt_path, pid in m.pairs:
        img = load_image(inp_path).pixels
        gt = to_grayscale(load_image(gt_path)) < 128
        for s in cfg.scales:
            simg, sgt = _scale_pair(img, gt, s)
            for rot in rotations:
                k = rot // 90
                rimg, rgt = np.rot90(simg, k), np.rot90(sgt, k)
                ig, gg = tile_patches(rimg, cfg.patch_size), tile_patches(rgt, cfg.patch_size)
                for (r, c, ip), (_, _, gp) in zip(ig.patches, gg.patches):
                    stem = f"{pid}_s{s:g}_r{rot}_{r}_{c}"
                    ipath, gpath = out / "inputs" / f"{stem}.png", out / "gt" / f"{stem}.png"
                    save_image(ip, ipath)
                    save_image(_gt_to_png(gp), gpath)
                    rows.append((pid, f"{s:g}", rot, r, c, ipath.relative_to(out), gpath.relative_to(out)))
        log.info("augmented %s", pid)
    with open(out / "patches.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PATCH_COLUMNS)
        writer.writerows(rows)
    return len(rows)


def _global_variants(arr: np.ndarray, cfg: AugmentConfig) -> list[tuple[str, np.ndarray]]:
    variants = [("id", arr)]
    if cfg.global_flips:
        variants += [("hflip", arr[:, ::-1]), ("vflip", arr[::-1])]
    variants += [(f"rot{r}", np.rot90(arr, r // 90)) for r in cfg.global_rotations]
    return variants


def augment_global_set(m: DatasetManifest, cfg: AugmentConfig, out) -> int:
    """Nearest-resize each page to ``global_size`` squared, then flip/rotate."""
    out = Path(out)
    (out / "inputs").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    size = cfg.global_size
    count = 0
    for inp_path, gt_path, pid in m.pairs:
        img = load_image(inp_path).pixels
        gt = to_grayscale(load_image(gt_path)) < 128
        if img.ndim == 2:
            small = resize(img, "nearest", size, size).astype(np.uint8)
        else:
            small = np.stack([resize(img[..., c], "nearest", size, size) for c in range(3)], -1).astype(np.uint8)
        sgt = resize_mask(gt, size, size)
        for (tag, vi), (_, vg) in zip(_global_variants(small, cfg), _global_variants(sgt, cfg)):
            save_image(np.ascontiguousarray(vi), out / "inputs" / f"{pid}_{tag}.png")
            save_image(_gt_to_png(np.ascontiguousarray(vg)), out / "gt" / f"{pid}_{tag}.png")
            count += 1
    return count
