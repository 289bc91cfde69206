"""Timing comparison of the compiled kernels against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from jndattack.dct import dct_basis
from jndattack.kernels import _fallback

try:
    from jndattack.kernels import _core
except ImportError:
    _core = None

CASES = [
    ("conv2d 5x5 @ 512x512", "conv2d", (512, 512), (5, 5)),
    ("conv2d 11x11 @ 256x256", "conv2d", (256, 256), (11, 11)),
    ("block_transform 8x8 @ 512x512", "block_transform", (512, 512), 8),
]


def bench(fn, args, repeat):
    fn(*args)  # warm up
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'case':34s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, kind, shape, karg in CASES:
        img = rng.uniform(0.0, 255.0, shape)
        if kind == "conv2d":
            arg = rng.normal(size=karg)
        else:
            arg = dct_basis(karg)
        t_np = bench(getattr(_fallback, kind), (img, arg), opts.repeat)
        if _core is None:
            print(f"{label:34s} {t_np * 1e3:9.2f}ms {'n/a':>10s} {'':>8s}")
            continue
        t_c = bench(getattr(_core, kind), (img, arg), opts.repeat)
        a = getattr(_fallback, kind)(img, arg)
        b = getattr(_core, kind)(img, arg)
        assert np.allclose(a, b, atol=1e-10), label
        print(f"{label:34s} {t_np * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms {t_np / t_c:7.1f}x")
    if _core is None:
        print("\ncompiled extension not built; showing fallback only")


if __name__ == "__main__":
    main()
