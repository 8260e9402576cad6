"""Exact and high-precision arithmetic on the circle identified with [0, 1).

Two point representations are provided: :class:`Mod1Rational` (exact reduced
rationals) and :class:`Mod1Fixed` (fixed-point dyadics ``mantissa / 2**P``
with a tracked error bound).  Both are immutable and every operation here is
a pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

__all__ = [
    "Mod1Rational",
    "Mod1Fixed",
    "OrbitGrid",
    "Mod1Point",
    "PrecisionExhausted",
    "mod1",
    "scale_pow",
    "phase",
    "phase_fraction",
    "random_point",
    "multiplicatively_independent",
    "check_pq",
    "fixed_bits_budget",
]

# a Mod1Fixed result must keep at least this many sound leading bits
MIN_SOUND_BITS = 40


class PrecisionExhausted(ArithmeticError):
    """Raised when a Mod1Fixed error bound swallows the usable precision.

    The caller should re-derive the point from its base at higher precision
    (see :func:`fixed_bits_budget`).
    """


@dataclass(frozen=True)
class Mod1Rational:
    """A rational point of [0, 1), stored reduced with 0 <= num < den."""

    num: int
    den: int

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if not 0 <= self.num < self.den:
            raise ValueError("numerator must satisfy 0 <= num < den")
        if math.gcd(self.num, self.den) != 1:
            raise ValueError("representation must be reduced")

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


def mod1(num: int, den: int) -> Mod1Rational:
    """Reduced representative of (num mod den) / den on the circle."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num, den = -num, -den
    num %= den
    g = math.gcd(num, den)
    return Mod1Rational(num // g, den // g)


@dataclass(frozen=True)
class Mod1Fixed:
    """Fixed-point circle value ``mantissa * 2**-precision``.

    ``err`` bounds the distance (in units of 2**-precision) between the
    stored dyadic and the real number it stands for.  err == 0 means the
    dyadic itself is the point, in which case arithmetic here stays exact
    forever: multiplying by an integer and reducing mod 1 is an exact
    operation on the mantissa.
    """

    mantissa: int
    precision: int
    err: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.precision <= 0:
            raise ValueError("precision must be positive")
        if not 0 <= self.mantissa < (1 << self.precision):
            raise ValueError("mantissa out of range for precision")
        if self.err < 0:
            raise ValueError("error bound must be nonnegative")

    @classmethod
    def from_fraction(cls, value: Fraction, bits: int) -> "Mod1Fixed":
        """Round a rational in [0, 1) to ``bits`` bits; err <= 1/2 ulp."""
        value = Fraction(value)
        value -= math.floor(value)
        scaled = value * (1 << bits)
        mant = round(scaled)
        err = abs(Fraction(mant) - scaled)
        return cls(mant % (1 << bits), bits, err)

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.precision)

    def abs_err(self) -> float:
        return float(self.err / (1 << self.precision))

    def __float__(self) -> float:
        return float(self.as_fraction())

    def __str__(self) -> str:
        return f"0x{self.mantissa:x}@{self.precision}"


Mod1Point = Union[Mod1Rational, Mod1Fixed]


def scale_pow(x: Mod1Point, p: int, i: int, q: int, j: int) -> Mod1Point:
    """p**i * q**j * x mod 1, exact for rationals, mantissa-exact for fixed.

    For Mod1Fixed the stored dyadic is transformed exactly; only the error
    bound is amplified by the factor.  PrecisionExhausted is raised once
    fewer than MIN_SOUND_BITS leading bits of the result remain trustworthy.
    """
    if i < 0 or j < 0:
        raise ValueError("exponents must be nonnegative")
    if p < 1 or q < 1:
        raise ValueError("multipliers must be positive")
    factor = p ** i * q ** j
    if isinstance(x, Mod1Rational):
        return mod1(x.num * factor, x.den)
    new_err = x.err * factor
    if new_err > 0 and new_err >= (1 << max(x.precision - MIN_SOUND_BITS, 0)):
        raise PrecisionExhausted(
            f"error bound {float(math.log2(new_err)):.1f} bits at precision "
            f"{x.precision}; re-derive the base with more bits")
    return Mod1Fixed((x.mantissa * factor) % (1 << x.precision), x.precision, new_err)


def phase_fraction(value: Fraction, k: int = 1) -> complex:
    """e(k * value) computed after reduction to the nearest quarter turn.

    The residual angle is at most pi/4, which keeps the relative error a few
    ulps (< 2**-50) and makes multiples of 1/4 exact.
    """
    num, den = value.numerator, value.denominator
    r = (k % den) * num % den
    num4 = 4 * r
    c = (2 * num4 + den) // (2 * den)
    rem = num4 - c * den
    theta = (math.pi / 2.0) * (rem / den)
    z = complex(math.cos(theta), math.sin(theta))
    return z * (1, 1j, -1, -1j)[c & 3]


def phase(x: Mod1Point, k: int) -> complex:
    """e(k x) on the unit circle; see phase_error_bound for the accuracy."""
    return phase_fraction(x.as_fraction(), k)


def phase_error_bound(x: Mod1Point, k: int) -> float:
    """Additive bound on ``|computed - e(k x_true)|``."""
    base = 2.0 ** -50
    if isinstance(x, Mod1Fixed) and x.err:
        base += 2.0 * math.pi * abs(k) * x.abs_err()
    return base


def random_point(bits: int, seed: int) -> Mod1Fixed:
    """Uniform random P-bit point with err = 0, deterministic per seed."""
    if bits < 64:
        raise ValueError("bits must be at least 64")
    rng = random.Random(seed)
    return Mod1Fixed(rng.getrandbits(bits), bits, Fraction(0))


def _integer_root(n: int, k: int) -> int:
    """Largest a with a**k <= n (n >= 1, k >= 1)."""
    if k == 1:
        return n
    a = round(n ** (1.0 / k))
    while a > 1 and a ** k > n:
        a -= 1
    while (a + 1) ** k <= n:
        a += 1
    return a


def multiplicatively_independent(p: int, q: int) -> bool:
    """True when p, q are not both powers of one integer base.

    Equivalent to log p / log q being irrational for p, q >= 2; checked
    finitely by scanning candidate bases a = p**(1/k), k <= log2 p.
    """
    if p < 2 or q < 2:
        return False
    for k in range(1, p.bit_length() + 1):
        a = _integer_root(p, k)
        if a < 2:
            break
        if a ** k != p:
            continue
        m = q
        while m % a == 0:
            m //= a
        if m == 1:
            return False
    return True


def check_pq(p: int, q: int) -> None:
    if p < 2 or q < 2:
        raise ValueError("p and q must be at least 2")
    if not multiplicatively_independent(p, q):
        raise ValueError(
            f"log {p}/log {q} is rational: {p} and {q} are powers of a common base")


def fixed_bits_budget(p: int, q: int, i_max: int, j_max: int,
                      output_bits: int = 48) -> int:
    """Mantissa bits needed so scale_pow up to p**i_max q**j_max keeps
    ``output_bits`` sound bits, plus 8 guard bits."""
    drift = math.ceil(i_max * math.log2(p) + j_max * math.log2(q))
    return drift + output_bits + 8


@dataclass(frozen=True)
class OrbitGrid:
    """The square orbit block {p**i q**j x mod 1 : 0 <= i, j < N}.

    Enumeration is row-major in (i, j) and deterministic.  Each row start is
    derived directly from the base point rather than from the previous row,
    so error growth for Mod1Fixed bases is linear in the exponents.
    """

    base: Mod1Point
    p: int
    q: int
    N: int

    def __post_init__(self) -> None:
        check_pq(self.p, self.q)
        if self.N < 1:
            raise ValueError("side length N must be positive")

    def __len__(self) -> int:
        return self.N * self.N

    @property
    def rational_base(self) -> bool:
        return isinstance(self.base, Mod1Rational)

    def row(self, i: int) -> Iterator[Mod1Point]:
        start = scale_pow(self.base, self.p, i, self.q, 0)
        point = start
        yield point
        for _ in range(self.N - 1):
            point = scale_pow(point, self.p, 0, self.q, 1)
            yield point

    def __iter__(self) -> Iterator[Mod1Point]:
        for i in range(self.N):
            yield from self.row(i)

    def points(self) -> list:
        return list(iter(self))
