"""NumPy implementations of the compiled kernels, used when the extension is absent."""
import numpy as np


def _neighbours(img):
    p = np.pad(img, 1)
    c = slice(1, -1)
    up, down, left, right = slice(None, -2), slice(2, None), slice(None, -2), slice(2, None)
    # P2..P9, clockwise from north
    return (p[up, c], p[up, right], p[c, right], p[down, right],
            p[down, c], p[down, left], p[c, left], p[up, left])


def zhang_suen(mask):
    img = (np.asarray(mask) != 0).astype(np.uint8)
    while True:
        changed = False
        for second in (False, True):
            p2, p3, p4, p5, p6, p7, p8, p9 = _neighbours(img)
            ring = (p2, p3, p4, p5, p6, p7, p8, p9, p2)
            b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9
            a = sum(((ring[i] == 0) & (ring[i + 1] == 1)).astype(np.uint8) for i in range(8))
            if second:
                keep = (p2 & p4 & p8) | (p2 & p6 & p8)
            else:
                keep = (p2 & p4 & p6) | (p4 & p6 & p8)
            delete = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & (keep == 0)
            if delete.any():
                img[delete] = 0
                changed = True
        if not changed:
            return img


def drd_flip_sum(gt_padded, pred, weights):
    g = np.asarray(gt_padded, dtype=np.uint8)
    p = np.asarray(pred, dtype=np.uint8)
    wt = np.asarray(weights, dtype=np.float64)
    h, w = p.shape
    m = wt.shape[0]
    r = m // 2
    flipped = p != g[r:r + h, r:r + w]
    if not flipped.any():
        return 0.0
    ys, xs = np.nonzero(flipped)
    v = p[ys, xs]
    total = np.zeros(len(ys))
    for i in range(m):
        for j in range(m):
            total += wt[i, j] * (g[ys + i, xs + j] != v)
    return float(total.sum())
