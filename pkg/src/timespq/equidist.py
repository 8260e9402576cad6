"""Counting functions, Weyl sums, discrepancy and ergodic averages.

All interval conventions are half-open [a, b).  Sums over orbit grids reduce
row by row through a fixed blocked pairwise tree (block 1024), so results
are bit-identical for any worker count and reproducible across runs.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .kernels import MAX_KERNEL_DEN, pairwise_sum, unit_phases
from .mod1 import (Mod1Fixed, Mod1Point, Mod1Rational, OrbitGrid, phase_fraction)

__all__ = [
    "EmpiricalMeasure",
    "WeylSum",
    "PhaseMonomial",
    "count_in_interval",
    "weyl_sum_single",
    "weyl_sum_square",
    "ergodic_average",
    "star_discrepancy",
    "empirical_cdf",
]

PointLike = Union[Mod1Point, Fraction, float, int]


def _as_fraction(x: PointLike) -> Fraction:
    if isinstance(x, (Mod1Rational, Mod1Fixed)):
        return x.as_fraction()
    return Fraction(x)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform probability measure on a finite list of circle points."""

    points: tuple

    def __post_init__(self) -> None:
        if len(self.points) == 0:
            raise ValueError("empirical measure needs at least one point")

    @classmethod
    def from_grid(cls, grid: OrbitGrid) -> "EmpiricalMeasure":
        return cls(tuple(grid))

    def fractions(self) -> list:
        return [_as_fraction(p) for p in self.points]


@dataclass(frozen=True)
class WeylSum:
    """Normalized exponential sum (1/n) sum e(k x_i) with an error estimate."""

    k: int
    n_terms: int
    value: complex
    err: float


class PhaseMonomial:
    """The circle character x -> e(k x), exact at quarter turns."""

    def __init__(self, k: int):
        self.k = k

    def __call__(self, x: PointLike) -> complex:
        return phase_fraction(_as_fraction(x), self.k)


def count_in_interval(points: Iterable[PointLike], a, b, N: int) -> Fraction:
    """|{x_1..x_N} cap [a, b)| / N with exact boundary decisions.

    Mod1Fixed points are classified by their stored mantissa; the error
    bound is ignored for counting.
    """
    lo, hi = Fraction(a), Fraction(b)
    if not 0 <= lo < hi <= 1:
        raise ValueError("need 0 <= a < b <= 1")
    taken = list(itertools.islice(points, N))
    if not taken:
        raise ValueError("empty enumeration")
    if len(taken) < N:
        raise ValueError(f"asked for {N} points, enumeration held {len(taken)}")
    hits = sum(1 for x in taken if lo <= _as_fraction(x) < hi)
    return Fraction(hits, N)


def _phase_points(points: Sequence[PointLike], k: int) -> np.ndarray:
    return np.array([phase_fraction(_as_fraction(x), k) for x in points],
                    dtype=np.complex128)


def _sum_error_estimate(n: int, point_err: float = 0.0) -> float:
    eps = float(np.finfo(np.float64).eps)
    return 2.0 ** -50 + point_err + eps * (math.log2(n) + 2) if n else 0.0


def weyl_sum_single(seq: Iterable[PointLike], k: int, N: int) -> WeylSum:
    """(1/N) sum_{n<=N} e(k x_n) over the first N points of the sequence."""
    if k == 0:
        raise ValueError("frequency k must be nonzero")
    if N < 1:
        raise ValueError("N must be positive")
    taken = list(itertools.islice(seq, N))
    if len(taken) < N:
        raise ValueError(f"asked for {N} points, enumeration held {len(taken)}")
    total = pairwise_sum(_phase_points(taken, k))
    return WeylSum(k, N, total / N, _sum_error_estimate(N))


def _merge_rows(partials: list) -> complex:
    return complex(pairwise_sum(np.array(partials, dtype=np.complex128)))


def _map_rows(row_fn: Callable[[int], complex], n_rows: int,
              workers: int) -> list:
    if workers <= 1:
        return [row_fn(i) for i in range(n_rows)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row_fn, range(n_rows)))


def _rational_residue_rows(grid: OrbitGrid):
    """Per-row int64 residue vectors r with orbit value r/den, or None when
    the denominator is too large for the int64 kernels."""
    base = grid.base
    num, den = base.num, base.den
    if den >= MAX_KERNEL_DEN:
        return None
    q_res = np.empty(grid.N, dtype=np.int64)
    r = 1
    for j in range(grid.N):
        q_res[j] = r
        r = (r * grid.q) % den
    def row(i: int) -> np.ndarray:
        lead = (num * pow(grid.p, i, den)) % den
        return (lead * q_res) % den
    return row


def weyl_sum_square(grid: OrbitGrid, k: int, workers: int = 1) -> WeylSum:
    """(1/N^2) sum over the N x N orbit block of e(k p**i q**j x).

    Row partial sums are combined through the fixed pairwise tree, so the
    value does not depend on ``workers``.
    """
    if k == 0:
        raise ValueError("frequency k must be nonzero")
    N = grid.N
    if grid.rational_base:
        rows = _rational_residue_rows(grid)
        if rows is not None:
            den = grid.base.den
            def row_sum(i: int) -> complex:
                return pairwise_sum(unit_phases(rows(i), k, den))
            partials = _map_rows(row_sum, N, workers)
            total = _merge_rows(partials)
            return WeylSum(k, N * N, total / (N * N), _sum_error_estimate(N * N))
    point_err = 0.0
    def row_sum(i: int) -> complex:
        pts = list(grid.row(i))
        return pairwise_sum(_phase_points(pts, k))
    if isinstance(grid.base, Mod1Fixed) and grid.base.err:
        worst = grid.base.err * grid.p ** (N - 1) * grid.q ** (N - 1)
        point_err = 2.0 * math.pi * abs(k) * float(
            worst / (1 << grid.base.precision))
    partials = _map_rows(row_sum, N, workers)
    total = _merge_rows(partials)
    return WeylSum(k, N * N, total / (N * N),
                   _sum_error_estimate(N * N, point_err))


def _coerce_values(values: list):
    if any(isinstance(v, complex) for v in values):
        return np.array([complex(float(v.real), float(v.imag))
                         if isinstance(v, complex) else float(v)
                         for v in values], dtype=np.complex128)
    return np.array([float(v) for v in values], dtype=np.float64)


def ergodic_average(grid: OrbitGrid, f: Callable, workers: int = 1):
    """(1/N^2) sum f(p**i q**j x mod 1) over the orbit block.

    ``f`` is evaluated on exact Fractions.  Rational bases are reduced to
    their residue classes so f runs once per distinct orbit value.
    """
    N = grid.N
    if grid.rational_base:
        rows = _rational_residue_rows(grid)
        if rows is not None:
            den = grid.base.den
            occurring = sorted({int(r) for i in range(N) for r in rows(i)})
            table = _coerce_values([f(Fraction(r, den)) for r in occurring])
            keys = np.array(occurring, dtype=np.int64)
            def row_sum(i: int):
                idx = np.searchsorted(keys, rows(i))
                return pairwise_sum(table[idx])
            partials = _map_rows(row_sum, N, workers)
            total = pairwise_sum(np.array(partials))
            return total / (N * N)
    def row_sum(i: int):
        vals = _coerce_values([f(p.as_fraction()) for p in grid.row(i)])
        return pairwise_sum(vals)
    partials = _map_rows(row_sum, N, workers)
    total = pairwise_sum(np.array(partials))
    return total / (N * N)


def star_discrepancy(points: Iterable[PointLike], N: int) -> Fraction:
    """sup over b of |A([0, b); N) - b|, exact by the sorted-points formula.

    Anchored (star) form only; the two-sided discrepancy over all [a, b)
    lies between this value and twice it.
    """
    if N < 1:
        raise ValueError("N must be positive")
    taken = list(itertools.islice(points, N))
    if len(taken) < N:
        raise ValueError(f"asked for {N} points, enumeration held {len(taken)}")
    xs = sorted(_as_fraction(x) for x in taken)
    best = Fraction(0)
    for i, x in enumerate(xs, 1):
        best = max(best, Fraction(i, N) - x, x - Fraction(i - 1, N))
    return best


def empirical_cdf(m: EmpiricalMeasure, x) -> Fraction:
    """Fraction of sample points strictly below x (the [0, x) convention)."""
    cut = Fraction(x)
    if not 0 <= cut <= 1:
        raise ValueError("x must lie in [0, 1]")
    vals = m.fractions()
    return Fraction(sum(1 for v in vals if v < cut), len(vals))
