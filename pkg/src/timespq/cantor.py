"""Exact Cantor-function (devil's staircase) evaluation on rationals.

The value at x is obtained from the base-3 expansion: halve every digit
before the first 1, truncate there, and read the result in base 2.  For
rational x the expansion is eventually periodic, so the value is an exact
rational: a dyadic when a 1-digit occurs or the expansion terminates, and a
closed-form geometric sum when the repeating block avoids the digit 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from . import kernels
from .mod1 import Mod1Rational

__all__ = [
    "TernaryDigits",
    "CantorValue",
    "LipschitzWitness",
    "ternary_digits",
    "first_one_index",
    "cantor_eval",
    "cantor_fraction",
    "cantor_samples",
    "self_similarity_check",
    "lipschitz_witness",
]

CantorArg = Union[Mod1Rational, Fraction, int]


def _as_unit_fraction(x: CantorArg) -> Fraction:
    value = x.as_fraction() if isinstance(x, Mod1Rational) else Fraction(x)
    if not 0 <= value <= 1:
        raise ValueError("argument must lie in [0, 1]")
    return value


@dataclass(frozen=True)
class TernaryDigits:
    """Eventually periodic base-3 expansion of a rational in [0, 1].

    ``integer_part`` is 1 only for the endpoint x = 1 (whose fractional
    digit list is empty).  Expansions never carry an all-2 tail: long
    division produces the terminating form directly, so 1/3 is (1,) with an
    empty period rather than 0 followed by repeating 2s.
    """

    preperiod: Tuple[int, ...]
    period: Tuple[int, ...]
    integer_part: int = 0

    def digit(self, n: int) -> int:
        """Digit x_n, 1-indexed as in x = sum x_n / 3**n."""
        if n <= len(self.preperiod):
            return self.preperiod[n - 1]
        if not self.period:
            return 0
        return self.period[(n - len(self.preperiod) - 1) % len(self.period)]


def ternary_digits(x: CantorArg, depth: Optional[int] = None) -> TernaryDigits:
    """Exact expansion via long division with state-repetition detection.

    ``depth`` caps the number of digits examined; rationals always close
    within den steps, so the cap only matters if set below that.
    """
    value = _as_unit_fraction(x)
    if value == 1:
        return TernaryDigits((), (), integer_part=1)
    num, den = value.numerator, value.denominator
    limit = den + 1 if depth is None else depth
    digits: list[int] = []
    seen: dict[int, int] = {}
    while num and num not in seen:
        if len(digits) >= limit:
            raise ValueError(
                f"expansion of {value} does not close within depth {limit}")
        seen[num] = len(digits)
        num *= 3
        d, num = divmod(num, den)
        digits.append(d)
    if num == 0:
        return TernaryDigits(tuple(digits), ())
    start = seen[num]
    return TernaryDigits(tuple(digits[:start]), tuple(digits[start:]))


def first_one_index(d: TernaryDigits) -> Union[int, float]:
    """Position of the first digit 1 (1-indexed), or math.inf if none."""
    for n, digit in enumerate(d.preperiod, 1):
        if digit == 1:
            return n
    for m, digit in enumerate(d.period, len(d.preperiod) + 1):
        if digit == 1:
            return m
    return math.inf


@dataclass(frozen=True)
class CantorValue:
    """Either an exact rational (lo == hi) or an enclosing interval."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        if not self.exact:
            raise ValueError("value is an interval; use lo/hi")
        return self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.midpoint())


def _halved_digit_sum(digits, start_index: int = 1) -> Fraction:
    total = Fraction(0)
    for n, d in enumerate(digits, start_index):
        total += Fraction(d, 2 ** (n + 1))
    return total


def cantor_eval(x: CantorArg, depth: Optional[int] = None) -> CantorValue:
    """Cantor function value, exact whenever the expansion resolves.

    With the default unlimited depth every rational input yields an exact
    value: either the dyadic truncation at the first 1-digit, or the closed
    form of the periodic 1-free expansion.  A finite depth that cuts the
    expansion short yields an interval of width 2**-depth.
    """
    value = _as_unit_fraction(x)
    if value == 1:
        return CantorValue(Fraction(1), Fraction(1))
    try:
        d = ternary_digits(value, depth)
    except ValueError:
        assert depth is not None
        num, den = value.numerator, value.denominator
        acc = Fraction(0)
        for n in range(1, depth + 1):
            num *= 3
            dig, num = divmod(num, den)
            if dig == 1:
                return CantorValue(acc + Fraction(1, 2 ** n),
                                   acc + Fraction(1, 2 ** n))
            acc += Fraction(dig, 2 ** (n + 1))
        return CantorValue(acc, acc + Fraction(1, 2 ** depth))
    m = first_one_index(d)
    if m != math.inf:
        acc = Fraction(0)
        for n in range(1, m):
            acc += Fraction(d.digit(n), 2 ** (n + 1))
        return CantorValue(acc + Fraction(1, 2 ** m), acc + Fraction(1, 2 ** m))
    # expansion free of 1s: halving digits gives a (pre)periodic binary number
    pre = _halved_digit_sum(d.preperiod)
    if d.period:
        block = _halved_digit_sum(d.period)
        tail = block * Fraction(2 ** len(d.period),
                                2 ** len(d.period) - 1) / 2 ** len(d.preperiod)
    else:
        tail = Fraction(0)
    total = pre + tail
    return CantorValue(total, total)


def cantor_fraction(x: CantorArg) -> Fraction:
    """Exact Cantor value as a Fraction (unlimited depth)."""
    return cantor_eval(x).value


def cantor_samples(nums, den: int) -> np.ndarray:
    """Vectorized float64 Cantor values at nums[i]/den (backend kernel)."""
    return kernels.cantor_values(nums, den)


def self_similarity_check(x: CantorArg, depth: Optional[int] = None
                          ) -> Tuple[bool, bool, bool]:
    """Exact checks of the three thirds identities at x:

    c(x/3) = c(x)/2,  c((x+1)/3) = 1/2,  c((x+2)/3) = 1/2 + c(x)/2.
    """
    value = _as_unit_fraction(x)
    cx = cantor_eval(value, depth)
    left = cantor_eval(value / 3, depth)
    mid = cantor_eval((value + 1) / 3, depth)
    right = cantor_eval((value + 2) / 3, depth)
    if all(v.exact for v in (cx, left, mid, right)):
        return (left.value == cx.value / 2,
                mid.value == Fraction(1, 2),
                right.value == Fraction(1, 2) + cx.value / 2)
    width = max(v.hi - v.lo for v in (cx, left, mid, right))
    return (abs(left.midpoint() - cx.midpoint() / 2) <= 2 * width,
            abs(mid.midpoint() - Fraction(1, 2)) <= 2 * width,
            abs(right.midpoint() - Fraction(1, 2) - cx.midpoint() / 2) <= 2 * width)


@dataclass(frozen=True)
class LipschitzWitness:
    x: Fraction
    y: Fraction
    quotient: Fraction


def lipschitz_witness(N: int) -> LipschitzWitness:
    """Difference quotient |c(1)-c(y)| / |1-y| for the point y whose ternary
    digits are 2 up to position N-1 and 1 at position N.

    The quotient equals (1/2) * (3/2)**N exactly, growing without bound, so
    the Cantor function admits no Lipschitz constant.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    y = sum(Fraction(2, 3 ** n) for n in range(1, N)) + Fraction(1, 3 ** N)
    x = Fraction(1)
    quotient = abs(cantor_fraction(x) - cantor_fraction(y)) / abs(x - y)
    return LipschitzWitness(x, y, quotient)
