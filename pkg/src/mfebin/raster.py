"""Raster I/O, channel handling and patch tiling.

Images move through the package as NumPy arrays:

* ``RasterImage`` wraps an 8-bit ``(H, W)`` or ``(H, W, 3)`` array as decoded
  from disk.
* a float image is a 2-D ``float64`` array of gray levels.
* a binary mask is a 2-D ``bool`` array where ``True`` marks text.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DimensionError, FormatError, IoError

__all__ = [
    "RasterImage",
    "ChannelSet",
    "PatchGrid",
    "load_image",
    "save_image",
    "load_mask",
    "save_mask",
    "to_grayscale",
    "split_channels",
    "tile_patches",
    "stitch_patches",
    "pad_reflect",
    "float_to_uint8",
    "GRAY_WEIGHTS",
]

# BT.601 luma
GRAY_WEIGHTS = (0.299, 0.587, 0.114)

_MODES_8BIT = {"1", "L", "LA", "P", "PA", "RGB", "RGBA", "RGBX", "CMYK", "YCbCr"}


@dataclass(frozen=True)
class RasterImage:
    """An 8-bit image with one or three interleaved channels."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise FormatError(f"expected uint8 pixels, got {px.dtype}")
        if not (px.ndim == 2 or (px.ndim == 3 and px.shape[2] == 3)):
            raise DimensionError(f"unsupported pixel array shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise DimensionError("image must be at least 1x1")
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape[:2]


@dataclass(frozen=True)
class ChannelSet:
    red: np.ndarray
    green: np.ndarray
    blue: np.ndarray
    gray: np.ndarray

    def __post_init__(self):
        shapes = {a.shape for a in self.planes()}
        if len(shapes) != 1:
            raise DimensionError(f"channel planes disagree in shape: {sorted(shapes)}")

    def planes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.red, self.green, self.blue, self.gray)

    names = ("red", "green", "blue", "gray")


@dataclass
class PatchGrid:
    """Non-overlapping square tiles cut from a padded image, in row-major order.

    ``patches`` holds ``(row, col, tile)`` triples.  The original extent is
    ``cols * patch_size - pad_right`` by ``rows * patch_size - pad_bottom``.
    """

    patch_size: int
    rows: int
    cols: int
    pad_right: int
    pad_bottom: int
    patches: list[tuple[int, int, np.ndarray]] = field(default_factory=list)

    @property
    def width(self) -> int:
        return self.cols * self.patch_size - self.pad_right

    @property
    def height(self) -> int:
        return self.rows * self.patch_size - self.pad_bottom

    def map(self, fn) -> "PatchGrid":
        """Apply ``fn`` to every tile, keeping the grid geometry."""
        return PatchGrid(
            self.patch_size, self.rows, self.cols, self.pad_right, self.pad_bottom,
            [(r, c, fn(p)) for r, c, p in self.patches],
        )


def load_image(path) -> RasterImage:
    """Decode an 8-bit PNG/BMP/TIFF file.

    Alpha channels are dropped and palette images are expanded to RGB.
    Inputs with more than 8 bits per sample raise :class:`FormatError`.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode not in _MODES_8BIT:
                raise FormatError(f"{path}: unsupported image mode {mode!r} (8-bit only)")
            im.load()
            if mode in ("1", "L"):
                arr = np.asarray(im.convert("L"), dtype=np.uint8)
            elif mode == "LA":
                arr = np.asarray(im.getchannel("L"), dtype=np.uint8)
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except FormatError:
        raise
    except FileNotFoundError as exc:
        raise IoError(f"{path}: no such file") from exc
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise IoError(f"{path}: cannot decode image ({exc})") from exc
    return RasterImage(arr)


def save_image(arr: np.ndarray, path) -> None:
    """Write an 8-bit gray or RGB array as PNG (or whatever the suffix implies)."""
    arr = np.asarray(arr)
    if arr.dtype != np.uint8:
        arr = float_to_uint8(arr)
    try:
        Image.fromarray(arr).save(Path(path))
    except OSError as exc:
        raise IoError(f"{path}: cannot write image ({exc})") from exc


def save_mask(mask: np.ndarray, path) -> None:
    """Store a mask as 8-bit grayscale: text is 0, background 255."""
    mask = np.asarray(mask, dtype=bool)
    save_image(np.where(mask, 0, 255).astype(np.uint8), path)


def load_mask(path) -> np.ndarray:
    """Read a DIBCO-style mask; pixels below 128 (gray) are text."""
    return to_grayscale(load_image(path)) < 128


def float_to_uint8(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half to even."""
    return np.rint(np.clip(values, 0, 255)).astype(np.uint8)


def to_grayscale(img: RasterImage) -> np.ndarray:
    px = img.pixels if isinstance(img, RasterImage) else np.asarray(img)
    if px.ndim == 2:
        return px.astype(np.float64)
    r, g, b = (px[..., i].astype(np.float64) for i in range(3))
    wr, wg, wb = GRAY_WEIGHTS
    return wr * r + wg * g + wb * b


def split_channels(img: RasterImage) -> ChannelSet:
    gray = to_grayscale(img)
    if img.channels == 1:
        return ChannelSet(gray, gray.copy(), gray.copy(), gray.copy())
    px = img.pixels
    return ChannelSet(*(px[..., i].astype(np.float64) for i in range(3)), gray)


def pad_reflect(arr: np.ndarray, pad_bottom: int, pad_right: int) -> np.ndarray:
    """Reflect-pad the first two axes on the bottom/right (edge pixel not repeated)."""
    if pad_bottom == 0 and pad_right == 0:
        return arr
    widths = [(0, pad_bottom), (0, pad_right)] + [(0, 0)] * (arr.ndim - 2)
    return np.pad(arr, widths, mode="reflect")


def tile_patches(img: np.ndarray, patch_size: int = 256) -> PatchGrid:
    """Cut ``img`` into ``patch_size`` tiles after reflect-padding right/bottom.

    Works on any array whose first two axes are spatial, so colour images tile
    the same way as single planes.
    """
    if patch_size < 2 or patch_size % 2:
        raise DimensionError(f"patch_size must be even and >= 2, got {patch_size}")
    img = np.asarray(img)
    h, w = img.shape[:2]
    if h < 2 or w < 2:
        raise DimensionError(f"image {w}x{h} is smaller than 2x2")
    rows = -(-h // patch_size)
    cols = -(-w // patch_size)
    pad_b = rows * patch_size - h
    pad_r = cols * patch_size - w
    padded = pad_reflect(img, pad_b, pad_r)
    patches = []
    for r in range(rows):
        for c in range(cols):
            y, x = r * patch_size, c * patch_size
            patches.append((r, c, padded[y:y + patch_size, x:x + patch_size].copy()))
    return PatchGrid(patch_size, rows, cols, pad_r, pad_b, patches)


def stitch_patches(grid: PatchGrid) -> np.ndarray:
    if len(grid.patches) != grid.rows * grid.cols:
        raise DimensionError(
            f"grid declares {grid.rows}x{grid.cols} tiles but holds {len(grid.patches)}")
    if not grid.patches:
        raise DimensionError("empty patch grid")
    size = grid.patch_size
    first = np.asarray(grid.patches[0][2])
    out = np.empty((grid.rows * size, grid.cols * size) + first.shape[2:], dtype=first.dtype)
    seen = set()
    for r, c, p in grid.patches:
        p = np.asarray(p)
        if p.shape[:2] != (size, size):
            raise DimensionError(f"patch ({r}, {c}) is {p.shape[1]}x{p.shape[0]}, expected {size}x{size}")
        if not (0 <= r < grid.rows and 0 <= c < grid.cols) or (r, c) in seen:
            raise DimensionError(f"patch position ({r}, {c}) is out of range or duplicated")
        seen.add((r, c))
        out[r * size:(r + 1) * size, c * size:(c + 1) * size] = p
    return out[:grid.height, :grid.width]
