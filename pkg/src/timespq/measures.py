"""Finitely supported invariant measures for the two multiplication maps.

Any rational seed lands, after finitely many applications of the maps, on a
point s/t whose denominator is coprime to pq.  Multiplication by p and q
then permutes the residues mod t, and the uniform measure on the closure of
the seed residue is invariant under both maps.  Everything in this module
is exact: atoms are reduced rationals and weights are Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Tuple

from .equidist import weyl_sum_square
from .mod1 import Mod1Rational, OrbitGrid, check_pq, mod1, phase_fraction

__all__ = [
    "AtomicMeasure",
    "CoprimeOrbitForm",
    "GenericityReport",
    "reduce_to_coprime",
    "multiplicative_orbit",
    "build_atomic_measure",
    "pushforward_times_n",
    "measure_moment",
    "generic_point_check",
]


@dataclass(frozen=True)
class CoprimeOrbitForm:
    """Orbit representative s/t with gcd(s,t) = 1 and gcd(t, pq) = 1.

    ``witness`` holds exponents (a, b) with p**a q**b x = s/t mod 1.
    """

    s: int
    t: int
    witness: Tuple[int, int]

    def __post_init__(self) -> None:
        if self.t <= 0 or not 0 <= self.s < self.t:
            raise ValueError("need 0 <= s < t")
        if math.gcd(self.s, self.t) != 1:
            raise ValueError("s/t must be reduced")

    def point(self) -> Mod1Rational:
        return Mod1Rational(self.s, self.t)


def reduce_to_coprime(x: Mod1Rational, p: int, q: int) -> CoprimeOrbitForm:
    """Strip the p- and q-parts of the denominator by moving along the orbit.

    Each multiplication by p shrinks the denominator by gcd(den, p), so the
    loop terminates and the witness exponents are the step counts used.
    """
    if p < 2 or q < 2:
        raise ValueError("p and q must be at least 2")
    cur = x
    a = 0
    while math.gcd(cur.den, p) > 1:
        cur = mod1(cur.num * p, cur.den)
        a += 1
    b = 0
    while math.gcd(cur.den, q) > 1:
        cur = mod1(cur.num * q, cur.den)
        b += 1
    return CoprimeOrbitForm(cur.num, cur.den, (a, b))


def multiplicative_orbit(seed: int, s: int, p: int, q: int) -> FrozenSet[int]:
    """Smallest subset of Z/s containing seed and closed under r -> pr, qr."""
    if s <= 0:
        raise ValueError("modulus must be positive")
    if math.gcd(s, p * q) != 1:
        raise ValueError(f"modulus {s} shares a factor with pq = {p * q}")
    if not 0 <= seed < s:
        raise ValueError("seed must be a residue mod s")
    seen = {seed}
    frontier = [seed]
    while frontier:
        r = frontier.pop()
        for nxt in ((r * p) % s, (r * q) % s):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return frozenset(seen)


@dataclass(frozen=True)
class AtomicMeasure:
    """Measure with atoms at j/modulus for j in the support of ``weights``.

    gcd(modulus, pq) = 1 and the support is closed under multiplication by
    p and q mod the modulus, so the measure is invariant under both maps.
    Measures built by :func:`build_atomic_measure` carry uniform weights on
    a single orbit closure; pushforwards keep exact weights in general.
    """

    modulus: int
    weights: Tuple[Tuple[int, Fraction], ...]
    p: int
    q: int

    def __post_init__(self) -> None:
        check_pq(self.p, self.q)
        if math.gcd(self.modulus, self.p * self.q) != 1:
            raise ValueError("modulus must be coprime to pq")
        total = Fraction(0)
        support = {r for r, _ in self.weights}
        for r, w in self.weights:
            if not 0 <= r < self.modulus:
                raise ValueError("atom residue out of range")
            if w <= 0:
                raise ValueError("weights must be positive")
            total += w
        if total != 1:
            raise ValueError("weights must sum to 1")
        for r in support:
            if (r * self.p) % self.modulus not in support or \
               (r * self.q) % self.modulus not in support:
                raise ValueError("support not closed under the two maps")

    @classmethod
    def uniform(cls, modulus: int, support: FrozenSet[int], p: int, q: int
                ) -> "AtomicMeasure":
        w = Fraction(1, len(support))
        weights = tuple(sorted((r, w) for r in support))
        return cls(modulus, weights, p, q)

    @property
    def support(self) -> FrozenSet[int]:
        return frozenset(r for r, _ in self.weights)

    def weight_map(self) -> Dict[int, Fraction]:
        return dict(self.weights)

    def atoms(self):
        """Sorted (point, weight) pairs with points as reduced rationals."""
        return [(mod1(r, self.modulus), w) for r, w in self.weights]

    def contains_point(self, x: Mod1Rational) -> bool:
        return any(pt == x for pt, _ in self.atoms())


def build_atomic_measure(seed: Mod1Rational, p: int, q: int) -> AtomicMeasure:
    """Uniform measure on the orbit closure of the seed's coprime form."""
    form = reduce_to_coprime(seed, p, q)
    orbit = multiplicative_orbit(form.s, form.t, p, q)
    return AtomicMeasure.uniform(form.t, orbit, p, q)


def pushforward_times_n(m: AtomicMeasure, n: int) -> AtomicMeasure:
    """Image of the measure under x -> n x mod 1, merging collided atoms."""
    if n < 1:
        raise ValueError("n must be positive")
    merged: Dict[int, Fraction] = {}
    for r, w in m.weights:
        key = (r * n) % m.modulus
        merged[key] = merged.get(key, Fraction(0)) + w
    return AtomicMeasure(m.modulus, tuple(sorted(merged.items())), m.p, m.q)


def measure_moment(m: AtomicMeasure, k: int) -> complex:
    """The character average mu(z^k) = sum_j w_j e(k j / modulus).

    Atoms sharing a phase argument k*j mod s pool their weights in exact
    arithmetic first (so k = 0 gives exactly 1), and the groups are summed
    in argument order, so moments of an invariant measure at k and k*p
    (or k*q) add identical float terms in identical order and compare
    bit-equal.
    """
    groups: Dict[int, Fraction] = {}
    for r, w in m.weights:
        arg = (k * r) % m.modulus
        groups[arg] = groups.get(arg, Fraction(0)) + w
    total = 0j
    for arg in sorted(groups):
        total += float(groups[arg]) * phase_fraction(Fraction(arg, m.modulus), 1)
    return total


@dataclass(frozen=True)
class GenericityReport:
    average: complex
    target: complex
    gap: float
    exploratory: bool


def generic_point_check(x: Mod1Rational, m: AtomicMeasure, k: int, N: int,
                        workers: int = 1) -> GenericityReport:
    """Orbit average of z^k at x over the N x N block against mu(z^k).

    ``exploratory`` flags a start point that is not an atom of the measure;
    the gap is still reported but carries no convergence claim.
    """
    grid = OrbitGrid(x, m.p, m.q, N)
    average = weyl_sum_square(grid, k, workers=workers).value
    target = measure_moment(m, k)
    return GenericityReport(average, target, abs(average - target),
                            exploratory=not m.contains_point(x))
