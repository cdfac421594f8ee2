"""Spherical-cap lower-bound witnesses on S² and a Monte Carlo check of them.

An open cap of height h around c is {x : ⟨x, c⟩ > 1 - h}; on S² its
normalised measure is h/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .exact import AlgebraicReal, FieldSpec, Sign, alg_sign, parse_rational

NORTH = (0.0, 0.0, 1.0)
SOUTH = (0.0, 0.0, -1.0)


def _exact_sqrt(r: Fraction):
    """√r as a Fraction when rational, else the generator of Q(√r)."""
    if r < 0:
        raise ValueError("negative radicand")
    p, q = r.numerator, r.denominator
    sp, sq = math.isqrt(p), math.isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return AlgebraicReal.generator(FieldSpec.quad(r))


def _le_cos_2pi_5(t: Fraction) -> bool:
    # cos(2π/5) = (√5 - 1)/4, so t <= it  <=>  4t + 1 <= √5
    s = 4 * t + 1
    return s <= 0 or s * s <= 5


def _check_t(t) -> Fraction:
    t = parse_rational(t)
    if t < -1 or not _le_cos_2pi_5(t):
        raise ValueError("t must lie in [-1, cos(2π/5)]")
    return t


def cap_height_for_t(t):
    """Largest height of an open cap with no two points at inner product t: 1 - √((t+1)/2)."""
    t = _check_t(t)
    return 1 - _exact_sqrt((t + 1) / 2)


@dataclass(frozen=True)
class Cap:
    center: tuple
    height: object  # Fraction, AlgebraicReal or float

    @property
    def threshold(self) -> float:
        return 1.0 - float(self.height)


@dataclass(frozen=True)
class CapConstruction:
    n: int
    caps: tuple
    open: bool = True

    def __post_init__(self):
        for cap in self.caps:
            norm = math.fsum(c * c for c in cap.center)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError("cap centres must be unit vectors")
            if not 0 < float(cap.height) < 2:
                raise ValueError("cap heights must lie in (0, 2)")

    def exact_measure(self):
        """Σ h/2; valid for pairwise disjoint caps on S²."""
        if self.n != 3:
            raise ValueError("closed-form cap measure implemented for S² only")
        total = Fraction(0)
        for cap in self.caps:
            total = total + cap.height / 2
        return total

    def centers_array(self) -> np.ndarray:
        return np.array([c.center for c in self.caps], dtype=np.float64).reshape(-1, 3)

    def thresholds_array(self) -> np.ndarray:
        return np.array([c.threshold for c in self.caps], dtype=np.float64)


@dataclass(frozen=True)
class LowerBoundResult:
    t: Fraction
    construction: CapConstruction
    measure: object


def single_t_lower_bound(t) -> LowerBoundResult:
    """One or two caps avoiding inner product t, with exact measure.

    t <= -1/2: one cap of height h (measure h/2).
    -1/2 < t <= 0: add the opposite cap of height h + 2t - 2ht (measure h + t - ht).
    0 <= t <= cos(2π/5): two opposite caps of height h (measure h).
    """
    t = _check_t(t)
    h = cap_height_for_t(t)
    if t <= Fraction(-1, 2):
        caps = (Cap(NORTH, h),)
        measure = h / 2
    elif t < 0:
        second = h + 2 * t - 2 * h * t
        caps = (Cap(NORTH, h), Cap(SOUTH, second))
        measure = h + t - h * t
    else:
        caps = (Cap(NORTH, h), Cap(SOUTH, h))
        measure = h
    return LowerBoundResult(t, CapConstruction(3, caps), measure)


def double_cap() -> CapConstruction:
    """Two antipodal open caps of geodesic radius π/4."""
    return single_t_lower_bound(0).construction


def compare(a, b) -> Sign:
    """Exact sign of a - b for Fractions / field elements."""
    return alg_sign(a - b)


@dataclass(frozen=True)
class MonteCarloReport:
    violations: int
    measure_estimate: float
    std_error: float
    samples: int
    inside: int


def _uniform_sphere(rng: np.random.Generator, size: int) -> np.ndarray:
    g = rng.standard_normal((size, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_rotations(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-random rotations: Gram-Schmidt on normal columns, then fix det = +1."""
    g = rng.standard_normal((size, 3, 3))
    a = g[:, :, 0]
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    b = g[:, :, 1] - np.einsum("ij,ij->i", a, g[:, :, 1])[:, None] * a
    b = b / np.linalg.norm(b, axis=1, keepdims=True)
    c = g[:, :, 2] - np.einsum("ij,ij->i", a, g[:, :, 2])[:, None] * a - np.einsum("ij,ij->i", b, g[:, :, 2])[:, None] * b
    c = c / np.linalg.norm(c, axis=1, keepdims=True)
    rot = np.stack([a, b, c], axis=2)
    flip = np.linalg.det(rot) < 0
    rot[flip, :, 2] *= -1.0
    return rot


def _pairs_at(rng: np.random.Generator, size: int, t: float) -> tuple[np.ndarray, np.ndarray]:
    # template u = e3, v = (√(1-t²), 0, t); rotate both by the same R
    rot = random_rotations(rng, size)
    s = math.sqrt(1.0 - t * t)
    u = rot[:, :, 2]
    v = s * rot[:, :, 0] + t * rot[:, :, 2]
    return u, v


def monte_carlo_validate(
    c: CapConstruction,
    t,
    samples: int,
    seed: int = 0,
    shards: int = 1,
    chunk: int = 1 << 18,
    use_numba: bool | None = None,
) -> MonteCarloReport:
    """Estimate the measure of ``c`` and count sampled pairs at inner product t inside it.

    Each shard gets its own streams from ``SeedSequence(seed).spawn(shards)``;
    results are summed, so a fixed (seed, shards) pair is reproducible.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    t = float(t)
    if not -1.0 < t < 1.0:
        raise ValueError("t must lie strictly between -1 and 1")
    if c.n != 3:
        raise ValueError("Monte Carlo validation is implemented for S² only")
    centers, thresholds = c.centers_array(), c.thresholds_array()
    seqs = np.random.SeedSequence(seed).spawn(shards)
    per = [samples // shards + (1 if k < samples % shards else 0) for k in range(shards)]
    inside = violations = 0
    for seq, count in zip(seqs, per):
        # separate point and pair streams keep results independent of ``chunk``
        point_rng, pair_rng = (np.random.default_rng(s) for s in seq.spawn(2))
        done = 0
        while done < count:
            m = min(chunk, count - done)
            pts = _uniform_sphere(point_rng, m)
            inside += _kernels.count_inside(pts, centers, thresholds, use_numba)
            u, v = _pairs_at(pair_rng, m, t)
            violations += _kernels.count_pairs_inside(u, v, centers, thresholds, use_numba)
            done += m
    p = inside / samples
    se = math.sqrt(p * (1 - p) / samples)
    return MonteCarloReport(violations, p, se, samples, inside)
