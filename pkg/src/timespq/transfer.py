"""The conditional-summation operators on C[0,1] and the fixed-point probe.

For n >= 2 the operator sends g to x -> sum_j [g((x+j)/n) - g(j/n)].  Its
monotone anchored fixed points common to two multiplicatively independent
multipliers encode the invariant measures of the corresponding circle maps
through their distribution functions, which is what the numeric search at
the bottom of this module pokes at.

Evaluables carry an ``exact_at_rational`` flag; when set, operator values at
rational points are computed in exact Fraction arithmetic, which the
identity and invariance checks rely on.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from . import cantor as _cantor
from .equidist import EmpiricalMeasure
from .kernels import pairwise_sum, pav_l2, unit_phases, MAX_KERNEL_DEN
from .measures import AtomicMeasure

__all__ = [
    "Evaluable",
    "Identity",
    "Polynomial",
    "CantorMap",
    "GridInterpolant",
    "TransferImage",
    "Combination",
    "StepDistribution",
    "GridFunction",
    "DistributionFunction",
    "FourierCoefficient",
    "IntegralIdentity",
    "FixpointTrace",
    "FlatFunctionError",
    "transfer_value",
    "apply_transfer",
    "semigroup_defect",
    "integral_identity_check",
    "distribution_of",
    "stieltjes_fourier",
    "transfer_residual",
    "isotonic_project",
    "fixpoint_search",
]

Scalar = Union[Fraction, float, int]


class FlatFunctionError(ValueError):
    """Samples are all equal, so anchoring to f(0)=0, f(1)=1 is impossible."""


# ---------------------------------------------------------------------------
# evaluable function representations

class Evaluable:
    """A function on [0, 1] that can be evaluated pointwise.

    Subclasses set ``exact_at_rational`` when a Fraction argument yields an
    exact Fraction result.  ``sample_grid`` evaluates at nums[i]/den in
    float64; the default loops over scalars, hot kinds override it.
    """

    exact_at_rational = False

    def __call__(self, x: Scalar):
        raise NotImplementedError

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        if self.exact_at_rational:
            return np.array([float(self(Fraction(int(t), den))) for t in nums],
                            dtype=np.float64)
        return np.array([float(self(t / den)) for t in nums], dtype=np.float64)


class Identity(Evaluable):
    exact_at_rational = True

    def __call__(self, x: Scalar):
        return x

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        return np.asarray(nums, dtype=np.float64) / den


class Polynomial(Evaluable):
    """Coefficients in ascending order; exact when they are all rational."""

    def __init__(self, coeffs: Sequence[Scalar]):
        self.coeffs = tuple(coeffs)
        self.exact_at_rational = all(
            isinstance(c, (int, Fraction)) for c in self.coeffs)

    def __call__(self, x: Scalar):
        acc: Scalar = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        xs = np.asarray(nums, dtype=np.float64) / den
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = acc * xs + float(c)
        return acc


class CantorMap(Evaluable):
    """The devil's staircase, exact on rationals."""

    exact_at_rational = True

    def __call__(self, x: Scalar):
        if isinstance(x, float):
            return float(_cantor.cantor_fraction(Fraction(x)))
        return _cantor.cantor_fraction(Fraction(x))

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        if 0 < den < MAX_KERNEL_DEN:
            return _cantor.cantor_samples(nums, den)
        return super().sample_grid(nums, den)


class GridInterpolant(Evaluable):
    """Piecewise-linear interpolant of a grid function; exact at the nodes."""

    def __init__(self, gf: "GridFunction"):
        self.gf = gf

    def __call__(self, x: Scalar):
        pos = float(x) * self.gf.K
        a = min(int(math.floor(pos)), self.gf.K - 1)
        a = max(a, 0)
        r = pos - a
        s = self.gf.samples
        return float(s[a] + r * (s[a + 1] - s[a]))

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        xs = np.asarray(nums, dtype=np.float64) / den
        return np.interp(xs, self.gf.nodes(), self.gf.samples)


class TransferImage(Evaluable):
    """The operator image of ``f`` for multiplier n, evaluated pointwise.

    Used where interpolating an intermediate grid would lose exactness,
    e.g. checking the composition law.
    """

    def __init__(self, f: Evaluable, n: int):
        if n < 2:
            raise ValueError("multiplier must be at least 2")
        self.f = f
        self.n = n
        self.exact_at_rational = getattr(f, "exact_at_rational", False)
        self._base: Optional[Scalar] = None

    def _base_sum(self) -> Scalar:
        if self._base is None:
            if self.exact_at_rational:
                self._base = sum(self.f(Fraction(j, self.n))
                                 for j in range(self.n))
            else:
                self._base = math.fsum(float(self.f(j / self.n))
                                       for j in range(self.n))
        return self._base

    def __call__(self, x: Scalar):
        if self.exact_at_rational and not isinstance(x, float):
            x = Fraction(x)
            total = -self._base_sum()
            for j in range(self.n):
                total += self.f((x + j) / self.n)
            return total
        xf = float(x)
        return math.fsum(float(self.f((xf + j) / self.n))
                         for j in range(self.n)) - self._base_sum()


class Combination(Evaluable):
    """Finite linear combination sum coef * f; exact when every part is."""

    def __init__(self, terms: Sequence):
        self.terms = tuple((c, f) for c, f in terms)
        self.exact_at_rational = all(
            isinstance(c, (int, Fraction)) and getattr(f, "exact_at_rational", False)
            for c, f in self.terms)

    def __call__(self, x: Scalar):
        acc: Scalar = 0
        for c, f in self.terms:
            acc = acc + c * f(x)
        return acc


class StepDistribution(Evaluable):
    """Right-continuous complement: D(x) = total weight of atoms below x."""

    exact_at_rational = True

    def __init__(self, positions: Sequence[Fraction], weights: Sequence[Fraction]):
        order = sorted(range(len(positions)), key=lambda i: positions[i])
        self.positions = [Fraction(positions[i]) for i in order]
        self.weights = [Fraction(weights[i]) for i in order]
        self.cumulative = []
        run = Fraction(0)
        for w in self.weights:
            run += w
            self.cumulative.append(run)

    def __call__(self, x: Scalar):
        cut = Fraction(x)
        i = bisect.bisect_left(self.positions, cut)
        out = self.cumulative[i - 1] if i else Fraction(0)
        return out if not isinstance(x, float) else float(out)

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        return np.array([float(self(Fraction(int(t), den))) for t in nums],
                        dtype=np.float64)


# ---------------------------------------------------------------------------
# grid functions

@dataclass(frozen=True)
class GridFunction:
    """K+1 float64 samples of a function at the nodes t/K."""

    K: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.samples, dtype=np.float64)
        if arr.shape != (self.K + 1,):
            raise ValueError(f"need {self.K + 1} samples, got {arr.shape}")
        object.__setattr__(self, "samples", arr)

    @classmethod
    def identity(cls, K: int) -> "GridFunction":
        return cls(K, np.arange(K + 1, dtype=np.float64) / K)

    @classmethod
    def from_evaluable(cls, f: Evaluable, K: int) -> "GridFunction":
        return cls(K, f.sample_grid(np.arange(K + 1), K))

    def nodes(self) -> np.ndarray:
        return np.arange(self.K + 1, dtype=np.float64) / self.K

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.samples) >= 0.0))

    @property
    def anchored(self) -> bool:
        return self.samples[0] == 0.0 and self.samples[-1] == 1.0

    def interpolant(self) -> GridInterpolant:
        return GridInterpolant(self)

    def max_step(self) -> float:
        """Largest jump between adjacent samples; a modulus-of-continuity
        proxy bounding the piecewise-linear interpolation error."""
        return float(np.max(np.abs(np.diff(self.samples))))


class DistributionFunction(Evaluable):
    """Monotone anchored evaluable D with D(0) = 0 and D(1) = 1."""

    def __init__(self, inner: Evaluable):
        self.inner = inner
        self.exact_at_rational = getattr(inner, "exact_at_rational", False)
        lo, hi = inner(Fraction(0)), inner(Fraction(1))
        if not (lo == 0 and hi == 1):
            raise ValueError(f"not anchored: D(0)={lo}, D(1)={hi}")
        self._grid_cache: dict = {}

    def __call__(self, x: Scalar):
        return self.inner(x)

    def sample_grid(self, nums: np.ndarray, den: int) -> np.ndarray:
        return self.inner.sample_grid(nums, den)

    def samples_on(self, den: int) -> np.ndarray:
        if den not in self._grid_cache:
            self._grid_cache[den] = self.inner.sample_grid(
                np.arange(den + 1), den)
        return self._grid_cache[den]


# ---------------------------------------------------------------------------
# operator application and identities

def _transfer_batch(f: Evaluable, n: int, xs: Iterable[Scalar]) -> List[Scalar]:
    """Operator values at each x, exact when f is exact on rationals."""
    if n < 2:
        raise ValueError("multiplier must be at least 2")
    if getattr(f, "exact_at_rational", False):
        base = sum(f(Fraction(j, n)) for j in range(n))
        out = []
        for x in xs:
            fx = Fraction(x)
            num, den = fx.numerator, fx.denominator
            nden = n * den
            acc = -base
            for j in range(n):
                acc += f(Fraction(num + j * den, nden))
            out.append(acc)
        return out
    base = math.fsum(float(f(j / n)) for j in range(n))
    return [math.fsum(float(f((float(x) + j) / n)) for j in range(n)) - base
            for x in xs]


def transfer_value(f: Evaluable, n: int, x: Scalar) -> Scalar:
    """Single-point operator value sum_j [f((x+j)/n) - f(j/n)]."""
    return _transfer_batch(f, n, [x])[0]


def apply_transfer(f: Evaluable, n: int, K: int) -> GridFunction:
    """Sample the operator image on the grid t/K, t = 0..K.

    Sample t is exactly sum_j [f((t/K+j)/n) - f(j/n)]; for exact f the value
    is computed in rational arithmetic and then rounded once to float64.
    """
    if K < 1:
        raise ValueError("output grid size must be positive")
    vals = _transfer_batch(f, n, [Fraction(t, K) for t in range(K + 1)])
    return GridFunction(K, np.array([float(v) for v in vals]))


def semigroup_defect(f: Evaluable, n: int, m: int, K: int):
    """max_t |T_n(T_m f) - T_nm f| at the nodes t/K.

    The inner image is evaluated exactly at the points the outer operator
    requests (no intermediate grid), so for exact f the defect is an exact
    rational -- zero when the composition law holds.
    """
    xs = [Fraction(t, K) for t in range(K + 1)]
    nested = _transfer_batch(TransferImage(f, m), n, xs)
    direct = _transfer_batch(f, n * m, xs)
    return max(abs(a - b) for a, b in zip(nested, direct))


QUADRATURE_NODES = 3 ** 8


@dataclass(frozen=True)
class IntegralIdentity:
    lhs: float
    rhs: Scalar
    quad_error_estimate: float


def integral_identity_check(f: Evaluable, n: int) -> IntegralIdentity:
    """Both sides of  integral(f) = sum_j f(j/n) / (n-1)  for invariant f.

    The left side is a composite trapezoid rule on 3**8 + 1 nodes with a
    Richardson error estimate from the 3**7 + 1 sub-grid; the right side is
    exact whenever f is.
    """
    if n < 2:
        raise ValueError("multiplier must be at least 2")
    M = QUADRATURE_NODES
    vals = f.sample_grid(np.arange(M + 1), M)
    lhs = float(np.trapezoid(vals, dx=1.0 / M))
    coarse = float(np.trapezoid(vals[::3], dx=3.0 / M))
    estimate = abs(lhs - coarse) / 8.0
    if getattr(f, "exact_at_rational", False):
        rhs: Scalar = sum(f(Fraction(j, n)) for j in range(n)) / (n - 1)
    else:
        rhs = math.fsum(float(f(j / n)) for j in range(n)) / (n - 1)
    return IntegralIdentity(lhs, rhs, estimate)


def distribution_of(m: Union[AtomicMeasure, EmpiricalMeasure]
                    ) -> DistributionFunction:
    """Distribution function x -> mass of [0, x) as an exact step evaluable."""
    if isinstance(m, AtomicMeasure):
        pairs = [(pt.as_fraction(), w) for pt, w in m.atoms()]
    else:
        fracs = m.fractions()
        w = Fraction(1, len(fracs))
        merged: dict = {}
        for v in fracs:
            merged[v] = merged.get(v, Fraction(0)) + w
        pairs = sorted(merged.items())
    positions = [p for p, _ in pairs]
    weights = [w for _, w in pairs]
    return DistributionFunction(StepDistribution(positions, weights))


@dataclass(frozen=True)
class FourierCoefficient:
    """Stieltjes-sum approximation of integral e(-k x) dD(x)."""

    k: int
    depth: int
    value: complex
    err: float


def _stieltjes_value(D: DistributionFunction, k: int, cells: int) -> complex:
    dvals = D.samples_on(cells)
    increments = np.diff(dvals)
    phases = unit_phases(np.arange(cells), -k, cells)
    return complex(pairwise_sum(phases * increments))


def stieltjes_fourier(D: DistributionFunction, k: int, depth: int
                      ) -> FourierCoefficient:
    """Riemann-Stieltjes sum over the 2 * 3**depth cell partition.

    Powers of 3 keep ternary-structured measures aligned with refinement.
    The error field is the change under one further refinement.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cells = 2 * 3 ** depth
    value = _stieltjes_value(D, k, cells)
    finer = _stieltjes_value(D, k, 3 * cells)
    return FourierCoefficient(k, depth, value, abs(finer - value))


def transfer_residual(f: Evaluable, ns: Iterable[int], K: int):
    """max over n in ns and grid nodes of |T_n f - f|, exact for exact f."""
    worst: Scalar = 0
    xs = [Fraction(t, K) for t in range(K + 1)]
    if getattr(f, "exact_at_rational", False):
        fvals = [f(x) for x in xs]
    else:
        fvals = [float(f(float(x))) for x in xs]
    for n in ns:
        tvals = _transfer_batch(f, n, xs)
        for tv, fv in zip(tvals, fvals):
            if tv == fv:
                continue
            dev = abs(tv - fv)
            if dev > worst:
                worst = dev
    return worst


# ---------------------------------------------------------------------------
# isotonic projection and the fixed-point search

def isotonic_project(gf: GridFunction) -> GridFunction:
    """Nearest nondecreasing samples (least squares), re-anchored to [0, 1].

    Already-feasible input passes through unchanged.  The affine
    renormalization after pooling restores f(0) = 0 and f(1) = 1 exactly.
    """
    v = pav_l2(gf.samples)
    if v[0] == v[-1]:
        raise FlatFunctionError("all samples equal after pooling")
    if not (v[0] == 0.0 and v[-1] == 1.0):
        v = (v - v[0]) / (v[-1] - v[0])
    return GridFunction(gf.K, v)


def _deviation_transfer(g: np.ndarray, n: int, K: int) -> np.ndarray:
    """Operator action on deviations from the identity, on the grid t/K.

    Interior evaluation points (t + jK)/(nK) are resolved by linear
    interpolation between the surrounding nodes; K must be divisible by n so
    the subtracted points j/n are themselves nodes.  The zero vector maps to
    exactly zero, which keeps the identity an exact fixed point in floats.
    """
    t = np.arange(K + 1)
    out = np.zeros(K + 1)
    for j in range(n):
        a, r = np.divmod(t + j * K, n)
        base = g[a]
        delta = np.where(r > 0, g[np.minimum(a + 1, K)] - base, 0.0)
        out += base + (r / n) * delta
        out -= g[(j * K) // n]
    return out


def _deviation_residual(g: np.ndarray, p: int, q: int, K: int) -> float:
    rp = float(np.max(np.abs(_deviation_transfer(g, p, K) - g)))
    rq = float(np.max(np.abs(_deviation_transfer(g, q, K) - g)))
    return max(rp, rq)


@dataclass
class FixpointTrace:
    """Per-iteration records; index 0 describes the start function."""

    residuals: List[float] = field(default_factory=list)
    distances: List[float] = field(default_factory=list)
    interp_bounds: List[float] = field(default_factory=list)
    feasible: List[bool] = field(default_factory=list)
    final: Optional[GridFunction] = None
    iterations: int = 0
    converged: bool = False


def fixpoint_search(f0: GridFunction, p: int, q: int, K: Optional[int] = None,
                    iters: int = 50, tol: Optional[float] = None,
                    mode: str = "mean") -> FixpointTrace:
    """Iterate the projected operator hunting common fixed points.

    Each step applies the two operators to the current iterate (mean mode
    averages them, alternate mode composes q-then-p), projects back onto the
    nondecreasing cone and re-anchors the endpoints.  The trace records the
    sup-norm residual max(|T_p f - f|, |T_q f - f|), the sup-distance to the
    identity, the interpolation-error proxy and feasibility per iterate.

    Grids are carried as deviations from the identity so that an identity
    start stays an exact fixed point of the float pipeline.
    """
    if K is None:
        K = f0.K
    if K != f0.K:
        raise ValueError("K must match the grid of f0")
    if K % (p * q) != 0:
        raise ValueError(f"grid {K} not commensurate: {p * q} must divide it")
    if mode not in ("mean", "alternate"):
        raise ValueError("mode must be 'mean' or 'alternate'")
    if not f0.monotone:
        raise ValueError("start function must be nondecreasing")
    if not f0.anchored:
        raise ValueError("start function must satisfy f(0)=0 and f(1)=1")

    nodes = f0.nodes()
    g = f0.samples - nodes
    trace = FixpointTrace()

    def record(gv: np.ndarray) -> float:
        res = _deviation_residual(gv, p, q, K)
        trace.residuals.append(res)
        trace.distances.append(float(np.max(np.abs(gv))))
        f_samples = nodes + gv
        trace.interp_bounds.append(float(np.max(np.abs(np.diff(f_samples)))))
        trace.feasible.append(bool(np.all(np.diff(f_samples) >= 0.0)
                                   and f_samples[0] == 0.0
                                   and f_samples[-1] == 1.0))
        return res

    res = record(g)
    for _ in range(iters):
        if tol is not None and res <= tol:
            trace.converged = True
            break
        if mode == "mean":
            cand = 0.5 * (_deviation_transfer(g, p, K)
                          + _deviation_transfer(g, q, K))
        else:
            cand = _deviation_transfer(_deviation_transfer(g, q, K), p, K)
        y = nodes + cand
        v = pav_l2(y)
        if v[0] == v[-1]:
            raise FlatFunctionError("iterate collapsed to a constant")
        if not (v[0] == 0.0 and v[-1] == 1.0):
            v = (v - v[0]) / (v[-1] - v[0])
        g = v - nodes
        trace.iterations += 1
        res = record(g)
    else:
        if tol is not None and res <= tol:
            trace.converged = True

    trace.final = GridFunction(K, nodes + g)
    return trace
