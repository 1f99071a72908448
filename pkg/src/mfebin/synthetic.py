"""Synthetic degraded document pages with exact ground truth."""
from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

__all__ = ["render_strokes", "degraded_page", "bimodal_page"]


def render_strokes(width: int, height: int, rng: np.random.Generator,
                   n_lines: int | None = None) -> np.ndarray:
    """Boolean mask of handwriting-like strokes laid out in text lines."""
    canvas = Image.new("L", (width, height), 0)
    draw = ImageDraw.Draw(canvas)
    line_h = max(12, height // 12)
    n_lines = n_lines or max(1, (height - line_h) // line_h)
    for li in range(n_lines):
        base = line_h // 2 + li * line_h + line_h // 2
        if base >= height - 4:
            break
        x = int(rng.integers(4, 16))
        while x < width - 16:
            word_w = int(rng.integers(16, 60))
            pts = []
            for px in np.linspace(x, min(x + word_w, width - 4), int(rng.integers(4, 10))):
                pts.append((float(px), float(base + rng.normal(0, line_h * 0.18))))
            draw.line(pts, fill=255, width=int(rng.integers(2, 5)), joint="curve")
            x += word_w + int(rng.integers(8, 24))
    return np.asarray(canvas) > 127


def degraded_page(seed: int, width: int = 256, height: int = 256, noise_sigma: float = 20.0,
                  ink: float = 60.0, page_tone: tuple[float, float] = (170.0, 230.0),
                  rgb: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Strokes on a shaded background with Gaussian noise.

    Returns ``(image, gt)`` where ``image`` is uint8 (gray, or RGB with a
    slight colour cast) and ``gt`` is the text mask.
    """
    rng = np.random.default_rng(seed)
    gt = render_strokes(width, height, rng)
    angle = rng.uniform(0, 2 * np.pi)
    yy, xx = np.mgrid[0:height, 0:width]
    ramp = (np.cos(angle) * xx / max(width - 1, 1) + np.sin(angle) * yy / max(height - 1, 1))
    ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-12)
    background = page_tone[0] + (page_tone[1] - page_tone[0]) * ramp
    clean = np.where(gt, ink, background)
    gray = clean + rng.normal(0, noise_sigma, clean.shape)
    if not rgb:
        return np.rint(np.clip(gray, 0, 255)).astype(np.uint8), gt
    cast = np.array([1.04, 1.0, 0.9])
    px = gray[..., None] * cast + rng.normal(0, noise_sigma / 4, clean.shape + (3,))
    return np.rint(np.clip(px, 0, 255)).astype(np.uint8), gt


def bimodal_page(seed: int, width: int = 256, height: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free page: text exactly 0, background exactly 255.

    Strokes are constant on aligned 2x2 blocks, so any 2x downscale keeps the
    two classes separable.
    """
    half = render_strokes(width // 2, height // 2, np.random.default_rng(seed))
    gt = np.kron(half, np.ones((2, 2), dtype=bool))
    return np.where(gt, 0, 255).astype(np.uint8), gt
