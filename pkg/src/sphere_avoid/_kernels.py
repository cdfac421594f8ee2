"""Hot loops: independent-set branch and bound, cap membership counting.

Each kernel is written once in plain Python/numpy.  When numba is importable
and ``SPHERE_AVOID_NUMBA`` is not ``0`` the same source is compiled with
``numba.njit``; otherwise the uncompiled path runs (vectorised numpy where
it helps).  Both paths must return identical results.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised when numba is absent
    numba = None


def numba_requested() -> bool:
    flag = os.environ.get("SPHERE_AVOID_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


def numba_enabled() -> bool:
    return numba is not None and numba_requested()


# ---------------------------------------------------------------------------
# maximum independent set on <= 64 vertices, adjacency as uint64 bitmasks


def _lowest_bit_index(mask):
    i = 0
    one = np.uint64(1)
    while (mask >> np.uint64(i)) & one == np.uint64(0):
        i += 1
    return i


def _clique_cover_size(cand, adj):
    # greedy cover of cand by cliques; an independent set meets each at most once
    count = 0
    one = np.uint64(1)
    rest = cand
    while rest != np.uint64(0):
        u = _lowest_bit_index(rest)
        ubit = one << np.uint64(u)
        rest = rest & ~ubit
        pool = rest & adj[u]
        while pool != np.uint64(0):
            w = _lowest_bit_index(pool)
            wbit = one << np.uint64(w)
            rest = rest & ~wbit
            pool = pool & ~wbit & adj[w]
        count += 1
    return count


def _mis_size(adj, nverts):
    one = np.uint64(1)
    if nverts == 0:
        return 0
    if nverts == 64:
        full = ~np.uint64(0)
    else:
        full = (one << np.uint64(nverts)) - one
    # explicit DFS stack of (candidate mask, current size)
    cap = 2 * nverts + 4
    stack_mask = np.zeros(cap, dtype=np.uint64)
    stack_size = np.zeros(cap, dtype=np.int64)
    stack_mask[0] = full
    stack_size[0] = 0
    top = 1
    best = 0
    while top > 0:
        top -= 1
        cand = stack_mask[top]
        size = stack_size[top]
        if cand == np.uint64(0):
            if size > best:
                best = size
            continue
        if size + _clique_cover_size(cand, adj) <= best:
            continue
        v = _lowest_bit_index(cand)
        vbit = one << np.uint64(v)
        # exclude v (explored second)
        stack_mask[top] = cand & ~vbit
        stack_size[top] = size
        top += 1
        # include v (explored first)
        stack_mask[top] = cand & ~vbit & ~adj[v]
        stack_size[top] = size + 1
        top += 1
    return best


def _mis_size_int(adj, nverts):
    # fallback: same search on Python ints, which beat numpy scalars here
    masks = [int(a) for a in adj]

    def cover(cand):
        count = 0
        rest = cand
        while rest:
            u = (rest & -rest).bit_length() - 1
            rest &= ~(1 << u)
            pool = rest & masks[u]
            while pool:
                w = (pool & -pool).bit_length() - 1
                rest &= ~(1 << w)
                pool &= ~(1 << w) & masks[w]
            count += 1
        return count

    best = 0
    stack = [((1 << nverts) - 1, 0)]
    while stack:
        cand, size = stack.pop()
        if not cand:
            best = max(best, size)
            continue
        if size + cover(cand) <= best:
            continue
        v = (cand & -cand).bit_length() - 1
        vbit = 1 << v
        stack.append((cand & ~vbit, size))
        stack.append((cand & ~vbit & ~masks[v], size + 1))
    return best


# ---------------------------------------------------------------------------
# cap membership


def _inside_union_numpy(points, centers, thresholds):
    if centers.shape[0] == 0:
        return np.zeros(points.shape[0], dtype=np.bool_)
    return (points @ centers.T > thresholds).any(axis=1)


def _count_inside_numpy(points, centers, thresholds):
    return int(_inside_union_numpy(points, centers, thresholds).sum())


def _count_pairs_inside_numpy(first, second, centers, thresholds):
    a = _inside_union_numpy(first, centers, thresholds)
    b = _inside_union_numpy(second, centers, thresholds)
    return int((a & b).sum())


def _inside_one(x, y, z, centers, thresholds):
    for k in range(centers.shape[0]):
        if x * centers[k, 0] + y * centers[k, 1] + z * centers[k, 2] > thresholds[k]:
            return True
    return False


def _count_inside_loop(points, centers, thresholds):
    total = 0
    for i in range(points.shape[0]):
        if _inside_one(points[i, 0], points[i, 1], points[i, 2], centers, thresholds):
            total += 1
    return total


def _count_pairs_inside_loop(first, second, centers, thresholds):
    total = 0
    for i in range(first.shape[0]):
        if _inside_one(first[i, 0], first[i, 1], first[i, 2], centers, thresholds):
            if _inside_one(second[i, 0], second[i, 1], second[i, 2], centers, thresholds):
                total += 1
    return total


_compiled: dict = {}


def _jit():
    if not _compiled:
        nj = numba.njit
        lowest = nj(_lowest_bit_index)
        g = {"np": np, "_lowest_bit_index": lowest}
        cover = nj(_rebind(_clique_cover_size, g))
        g["_clique_cover_size"] = cover
        _compiled["mis"] = nj(_rebind(_mis_size, g))
        inside = nj(_inside_one)
        g["_inside_one"] = inside
        _compiled["count"] = nj(_rebind(_count_inside_loop, g))
        _compiled["pairs"] = nj(_rebind(_count_pairs_inside_loop, g))
    return _compiled


def _rebind(func, globs):
    # same code object, globals pointing at the compiled helpers
    import types

    merged = dict(func.__globals__)
    merged.update(globs)
    return types.FunctionType(func.__code__, merged, func.__name__, func.__defaults__)


def mis_size(adj: np.ndarray, nverts: int, use_numba: bool | None = None) -> int:
    """Independence number from uint64 adjacency masks (lowest-index branching)."""
    adj = np.ascontiguousarray(adj, dtype=np.uint64)
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba:
        return int(_jit()["mis"](adj, np.int64(nverts)))
    return _mis_size_int(adj, nverts)


def count_inside(points, centers, thresholds, use_numba: bool | None = None) -> int:
    """Number of points with ⟨x, c_k⟩ > threshold_k for some cap k."""
    if use_numba is None:
        use_numba = numba_enabled()
    points = np.ascontiguousarray(points, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64).reshape(-1, 3)
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    if use_numba:
        return int(_jit()["count"](points, centers, thresholds))
    return _count_inside_numpy(points, centers, thresholds)


def count_pairs_inside(first, second, centers, thresholds, use_numba: bool | None = None) -> int:
    """Number of rows i with both first[i] and second[i] inside the cap union."""
    if use_numba is None:
        use_numba = numba_enabled()
    first = np.ascontiguousarray(first, dtype=np.float64)
    second = np.ascontiguousarray(second, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64).reshape(-1, 3)
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    if use_numba:
        return int(_jit()["pairs"](first, second, centers, thresholds))
    return _count_pairs_inside_numpy(first, second, centers, thresholds)
