"""Independent reference implementations used as test oracles.

Each one is written from the defining formula with plain loops so it
shares no code path with the package under test.
"""
import math
from fractions import Fraction

import numpy as np


def naive_haar(x):
    """Block-by-block Haar analysis written out per pixel."""
    h, w = x.shape
    out = {k: np.zeros((h // 2, w // 2)) for k in ("ll", "lh", "hl", "hh")}
    for i in range(h // 2):
        for j in range(w // 2):
            a, b = x[2 * i, 2 * j], x[2 * i, 2 * j + 1]
            c, d = x[2 * i + 1, 2 * j], x[2 * i + 1, 2 * j + 1]
            out["ll"][i, j] = 0.5 * (a + b + c + d)
            out["lh"][i, j] = 0.5 * (a - b + c - d)
            out["hl"][i, j] = 0.5 * (a + b - c - d)
            out["hh"][i, j] = 0.5 * (a - b - c + d)
    return out


def _cubic(t, a=-0.75):
    t = abs(t)
    if t <= 1:
        return (a + 2) * t ** 3 - (a + 3) * t ** 2 + 1
    if t < 2:
        return a * t ** 3 - 5 * a * t ** 2 + 8 * a * t - 4 * a
    return 0.0


def _lanczos(t, n=4):
    if t == 0:
        return 1.0
    if abs(t) >= n:
        return 0.0
    pt = math.pi * t
    return n * math.sin(pt) * math.sin(pt / n) / (pt * pt)


def _clampi(i, n):
    return min(max(i, 0), n - 1)


def naive_resize(img, kind, out_w, out_h):
    """Direct per-output-pixel kernel summation over a 2-D neighbourhood."""
    h, w = img.shape
    sy, sx = h / out_h, w / out_w
    out = np.zeros((out_h, out_w))
    for i in range(out_h):
        for j in range(out_w):
            if kind == "nearest":
                yy = min(int(math.floor((i + 0.5) * sy)), h - 1)
                xx = min(int(math.floor((j + 0.5) * sx)), w - 1)
                out[i, j] = img[yy, xx]
                continue
            if kind == "area":
                y0, y1, x0, x1 = i * sy, (i + 1) * sy, j * sx, (j + 1) * sx
                acc = area = 0.0
                for y in range(h):
                    oy = max(0.0, min(y1, y + 1) - max(y0, y))
                    for x in range(w):
                        ox = max(0.0, min(x1, x + 1) - max(x0, x))
                        acc += oy * ox * img[y, x]
                        area += oy * ox
                out[i, j] = acc / area
                continue
            cy, cx = (i + 0.5) * sy - 0.5, (j + 0.5) * sx - 0.5
            fy, fx = math.floor(cy), math.floor(cx)
            if kind == "bilinear":
                taps, k = range(0, 2), lambda t: max(0.0, 1 - abs(t))
            elif kind == "bicubic":
                taps, k = range(-1, 3), _cubic
            else:
                taps, k = range(-3, 5), _lanczos
            acc = norm = 0.0
            for dy in taps:
                for dx in taps:
                    wt = k(cy - (fy + dy)) * k(cx - (fx + dx))
                    acc += wt * img[_clampi(fy + dy, h), _clampi(fx + dx, w)]
                    norm += wt
            out[i, j] = acc / norm if kind == "lanczos" else acc
    return out



def otsu_exhaustive(img):
    """Argmax over all 256 thresholds of w0*w1*(mu0 - mu1)^2, smallest t on ties.

    Class 0 is ``v <= t``.  Values are compared as exact rationals.
    """
    vals = [int(v) for v in np.asarray(img, dtype=np.int64).ravel()]
    hist = [0] * 256
    for v in vals:
        hist[v] += 1
    n = len(vals)
    s_all = sum(i * c for i, c in enumerate(hist))
    best_t, best = 0, Fraction(-1)
    n0 = s0 = 0
    for t in range(256):
        n0 += hist[t]
        s0 += t * hist[t]
        n1, s1 = n - n0, s_all - s0
        if n0 == 0 or n1 == 0:
            var = Fraction(0)
        else:
            var = Fraction(n0 * n1, n * n) * (Fraction(s0, n0) - Fraction(s1, n1)) ** 2
        if var > best:
            best_t, best = t, var
    return best_t


def _reflect(i, n):
    while i < 0 or i >= n:
        i = -i if i < 0 else 2 * (n - 1) - i
    return i


def naive_window_sums(img, window):
    """Exact integer window sum and sum of squares with mirror borders."""
    x = np.asarray(img, dtype=np.int64)
    h, w = x.shape
    r = window // 2
    s1 = np.zeros((h, w), dtype=np.int64)
    s2 = np.zeros((h, w), dtype=np.int64)
    for y in range(h):
        ys = [_reflect(y + d, h) for d in range(-r, r + 1)]
        for xx in range(w):
            xs = [_reflect(xx + d, w) for d in range(-r, r + 1)]
            block = x[np.ix_(ys, xs)]
            s1[y, xx] = int(block.sum())
            s2[y, xx] = int((block * block).sum())
    return s1, s2


def drd_bruteforce(pred, gt, window=5, block=8):
    """Distance-reciprocal distortion straight from its definition."""
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    h, w = gt.shape
    r = window // 2
    wm = [[0.0 if (i, j) == (r, r) else 1.0 / math.hypot(i - r, j - r) for j in range(window)]
          for i in range(window)]
    total_w = sum(sum(row) for row in wm)
    nubn = 0
    for by in range(0, h, block):
        for bx in range(0, w, block):
            vals = {bool(gt[y, x]) for y in range(by, min(by + block, h))
                    for x in range(bx, min(bx + block, w))}
            nubn += len(vals) == 2
    acc = 0.0
    for y in range(h):
        for x in range(w):
            if pred[y, x] == gt[y, x]:
                continue
            for i in range(window):
                for j in range(window):
                    g = gt[_reflect(y + i - r, h), _reflect(x + j - r, w)]
                    acc += wm[i][j] / total_w * abs(int(g) - int(pred[y, x]))
    return acc / nubn
