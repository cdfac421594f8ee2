"""Time the numba kernels against the pure-numpy / pure-Python fallbacks.

    python3 benchmarks/bench_kernels.py [--samples N] [--vertices V] [--repeat R]

Both paths are checked to give identical counts before timing is reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from sphere_avoid import _kernels
from sphere_avoid.constructions import _pairs_at, _uniform_sphere, double_cap


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def random_masks(rng, n, p):
    masks = [0] * n
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                masks[a] |= 1 << b
                masks[b] |= 1 << a
    return np.array(masks, dtype=np.uint64)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=2_000_000)
    ap.add_argument("--vertices", type=int, default=60)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.numba_enabled():
        raise SystemExit("numba is unavailable or disabled; nothing to compare")

    rng = np.random.default_rng(0)
    cap = double_cap()
    centers, thr = cap.centers_array(), cap.thresholds_array()
    pts = _uniform_sphere(rng, args.samples)
    u, v = _pairs_at(rng, args.samples, 0.0)
    adj = random_masks(rng, args.vertices, 0.25)

    cases = {
        "count_inside": lambda flag: _kernels.count_inside(pts, centers, thr, flag),
        "count_pairs_inside": lambda flag: _kernels.count_pairs_inside(u, v, centers, thr, flag),
        f"mis_size ({args.vertices} vertices)": lambda flag: _kernels.mis_size(adj, args.vertices, flag),
    }
    print(f"{'kernel':32s} {'numba [s]':>10s} {'fallback [s]':>13s} {'speedup':>8s}")
    for name, fn in cases.items():
        fn(True)  # compile outside the timed region
        t_jit, r_jit = best_of(lambda: fn(True), args.repeat)
        t_py, r_py = best_of(lambda: fn(False), args.repeat)
        if r_jit != r_py:
            raise SystemExit(f"{name}: paths disagree ({r_jit} vs {r_py})")
        print(f"{name:32s} {t_jit:10.4f} {t_py:13.4f} {t_py / t_jit:7.1f}x")


if __name__ == "__main__":
    main()
