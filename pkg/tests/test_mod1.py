import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timespq.mod1 import (Mod1Fixed, Mod1Rational, OrbitGrid,
                          PrecisionExhausted, fixed_bits_budget, mod1,
                          multiplicatively_independent, phase,
                          phase_error_bound, phase_fraction, random_point,
                          scale_pow)


class TestMod1Factory:
    def test_already_reduced(self):
        assert mod1(3, 20) == Mod1Rational(3, 20)

    def test_wraps_and_reduces(self):
        assert mod1(36, 20) == Mod1Rational(4, 5)

    def test_negative_wraps(self):
        assert mod1(-1, 4) == Mod1Rational(3, 4)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            mod1(1, 0)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            Mod1Rational(2, 4)
        with pytest.raises(ValueError):
            Mod1Rational(5, 4)

    @given(st.integers(-10**9, 10**9), st.integers(1, 10**6))
    def test_matches_fraction_arithmetic(self, num, den):
        got = mod1(num, den)
        want = Fraction(num, den) % 1
        assert got.as_fraction() == want


class TestScalePow:
    def test_reduced_example(self):
        # oracle: 2**2 * 3 * 3/20 = 36/20 = 9/5 == 4/5 mod 1
        assert scale_pow(mod1(3, 20), 2, 2, 3, 1) == mod1(4, 5)

    def test_zero_fixed_point(self):
        assert scale_pow(mod1(0, 1), 2, 7, 3, 9) == mod1(0, 1)

    def test_single_doubling(self):
        assert scale_pow(mod1(1, 5), 2, 1, 3, 0) == mod1(2, 5)

    def test_rejects_negative_exponents(self):
        with pytest.raises(ValueError):
            scale_pow(mod1(1, 5), 2, -1, 3, 0)

    @settings(max_examples=60)
    @given(st.integers(0, 10**6 - 1), st.integers(1, 10**6),
           st.integers(0, 20), st.integers(0, 20),
           st.integers(0, 20), st.integers(0, 20))
    def test_exponent_additivity(self, num, den, a, b, c, d):
        x = mod1(num, den)
        two_step = scale_pow(scale_pow(x, 2, a, 3, b), 2, c, 3, d)
        one_step = scale_pow(x, 2, a + c, 3, b + d)
        assert two_step == one_step

    def test_multiplication_by_p_permutes_residues(self):
        # gcd(den, p*q) = 1: applying x -> p x order-many times returns x
        rng = random.Random(7)
        for _ in range(25):
            den = rng.choice([5, 7, 11, 25, 49, 55, 77, 91, 625])
            num = rng.randrange(1, den)
            x = mod1(num, den)
            order = 1
            r = 2 % x.den
            while r != 1:
                r = (r * 2) % x.den
                order += 1
            y = x
            for _ in range(order):
                y = scale_pow(y, 2, 1, 3, 0)
            assert y == x


class TestMod1Fixed:
    def test_random_point_contract(self):
        x = random_point(64, 0)
        assert x.err == 0
        assert 0 <= x.as_fraction() < 1
        assert random_point(64, 0) == random_point(64, 0)
        assert random_point(64, 0) != random_point(64, 1)
        assert random_point(256, 1).precision == 256

    def test_random_point_needs_64_bits(self):
        with pytest.raises(ValueError):
            random_point(32, 0)

    def test_exact_scaling_of_dyadic(self):
        x = Mod1Fixed(0b1011, 4)  # 11/16
        y = scale_pow(x, 2, 1, 3, 1)  # 66/16 mod 1 = 2/16
        assert y.as_fraction() == Fraction(2, 16)
        assert y.err == 0

    def test_err_amplification_and_exhaustion(self):
        x = Mod1Fixed.from_fraction(Fraction(1, 5), 80)
        assert 0 < x.err <= Fraction(1, 2)
        y = scale_pow(x, 2, 3, 3, 2)
        assert y.err == x.err * 8 * 9
        with pytest.raises(PrecisionExhausted):
            scale_pow(x, 2, 60, 3, 10)

    def test_err_zero_never_exhausts(self):
        x = random_point(64, 3)
        y = scale_pow(x, 2, 500, 3, 500)
        assert y.err == 0

    def test_err_bound_soundness_against_double_precision(self):
        # the value at precision P stays within its bound of the 2P value
        rng = random.Random(11)
        P = 96
        for _ in range(1000):
            den = rng.randrange(3, 10**6)
            num = rng.randrange(0, den)
            fr = Fraction(num, den)
            i, j = rng.randrange(0, 8), rng.randrange(0, 8)
            lo = scale_pow(Mod1Fixed.from_fraction(fr, P), 2, i, 3, j)
            hi = scale_pow(Mod1Fixed.from_fraction(fr, 2 * P), 2, i, 3, j)
            dev = abs(lo.as_fraction() - hi.as_fraction())
            dev = min(dev, 1 - dev)  # circle distance
            bound = (lo.err / (1 << lo.precision)
                     + hi.err / (1 << hi.precision))
            assert dev <= bound

    def test_budget_covers_grid(self):
        bits = fixed_bits_budget(2, 3, 63, 63, output_bits=48)
        x = Mod1Fixed.from_fraction(Fraction(1, 5), bits)
        y = scale_pow(x, 2, 63, 3, 63)  # no exhaustion
        assert y.err > 0


class TestPhase:
    def test_quarter_values_exact(self):
        assert phase(mod1(0, 1), 1) == 1
        assert phase(mod1(1, 2), 1) == -1
        assert phase(mod1(1, 4), 1) == 1j

    @given(st.integers(0, 10**4), st.integers(1, 10**4), st.integers(-8, 8))
    def test_unit_modulus(self, num, den, k):
        z = phase(mod1(num, den), k)
        assert abs(abs(z) - 1.0) < 1e-12

    def test_accuracy_against_high_precision(self):
        # reference via exact series argument in 2^-80 arithmetic
        import mpmath
        mpmath.mp.prec = 90
        for den in (7, 97, 360, 9973):
            for num in range(0, den, max(1, den // 23)):
                z = phase(mod1(num, den), 1)
                ref = mpmath.expjpi(2 * mpmath.mpf(num) / den)
                assert abs(complex(ref) - z) < 2 ** -50

    def test_error_bound_propagates_for_fixed_points(self):
        # phase of the amplified approximation stays within the bound of
        # the phase of the exactly-amplified true point
        target = Fraction(1, 7)
        for bits, i, k in [(64, 10, 1), (80, 20, 3), (96, 12, -2)]:
            approx = scale_pow(Mod1Fixed.from_fraction(target, bits), 2, i, 3, 0)
            true_phase = phase_fraction(target * 2 ** i % 1, k)
            bound = phase_error_bound(approx, k)
            assert abs(phase(approx, k) - true_phase) <= bound
            assert bound > 2 ** -50  # the fixed-point term is present


class TestIndependence:
    def test_powers_of_two_rejected(self):
        assert not multiplicatively_independent(4, 2)
        assert not multiplicatively_independent(8, 4)
        assert not multiplicatively_independent(27, 9)
        assert not multiplicatively_independent(6, 36)
        assert not multiplicatively_independent(2, 2)

    def test_valid_pairs(self):
        for p, q in [(2, 3), (3, 2), (6, 10), (4, 6), (12, 18), (2, 10)]:
            assert multiplicatively_independent(p, q)

    def test_grid_rejects_dependent_pair(self):
        with pytest.raises(ValueError):
            OrbitGrid(mod1(1, 5), 4, 2, 4)


class TestOrbitGrid:
    def test_row_major_enumeration_matches_oracle(self):
        grid = OrbitGrid(mod1(1, 5), 2, 3, 4)
        got = [p.as_fraction() for p in grid]
        want = [Fraction(2 ** i * 3 ** j, 5) % 1
                for i in range(4) for j in range(4)]
        assert got == want
        assert len(grid) == 16

    def test_fixed_rows_derive_from_base(self):
        base = random_point(128, 5)
        grid = OrbitGrid(base, 2, 3, 3)
        pts = grid.points()
        for i in range(3):
            for j in range(3):
                want = (base.as_fraction() * 2 ** i * 3 ** j) % 1
                assert pts[3 * i + j].as_fraction() == want
