"""Compare the compiled and NumPy kernels on realistic page-sized masks.

    python benchmarks/bench_kernels.py [--size 1024] [--repeat 3]
"""
import argparse
import time

import numpy as np

from mfebin.kernels import _pykernels
from mfebin.metrics import drd_weights
from mfebin.synthetic import degraded_page

try:
    from mfebin.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    _, gt = degraded_page(0, args.size, args.size)
    gt = gt.astype(np.uint8)
    rng = np.random.default_rng(0)
    pred = (gt ^ (rng.random(gt.shape) < 0.02)).astype(np.uint8)
    gt_pad = np.pad(gt, 2, mode="reflect")
    w = drd_weights(5)

    cases = {
        "zhang_suen": lambda mod: mod.zhang_suen(gt),
        "drd_flip_sum": lambda mod: mod.drd_flip_sum(gt_pad, pred, w),
    }
    print(f"{args.size}x{args.size} mask, best of {args.repeat}")
    print(f"{'kernel':<14}{'numpy':>10}{'cython':>10}{'speedup':>9}")
    for name, call in cases.items():
        tp, rp = best_of(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<14}{tp:>9.3f}s{'--':>10}{'--':>9}")
            continue
        tc, rc = best_of(lambda: call(_ckernels), args.repeat)
        if name == "zhang_suen":
            assert np.array_equal(rp, rc)
        else:
            assert abs(rp - rc) <= 1e-9 * max(1.0, abs(rp))
        print(f"{name:<14}{tp:>9.3f}s{tc:>9.3f}s{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
