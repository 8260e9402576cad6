import math
import random
from fractions import Fraction

import pytest

from timespq.measures import (AtomicMeasure, build_atomic_measure,
                              generic_point_check, measure_moment,
                              multiplicative_orbit, pushforward_times_n,
                              reduce_to_coprime)
from timespq.mod1 import mod1


def oracle_coprime_part(n: int, p: int, q: int) -> int:
    """Largest divisor of n coprime to pq (independent gcd-stripping)."""
    t = n
    while (g := math.gcd(t, p * q)) > 1:
        t //= g
    return t


def oracle_orbit(seed: int, s: int, p: int, q: int) -> set:
    """Exhaustive product table {seed * p**i * q**j mod s}."""
    return {(seed * pow(p, i, s) * pow(q, j, s)) % s
            for i in range(s + 1) for j in range(s + 1)}


class TestReduceToCoprime:
    def test_strips_twos_from_twenty(self):
        form = reduce_to_coprime(mod1(3, 20), 2, 3)
        assert (form.s, form.t, form.witness) == (3, 5, (2, 0))

    def test_five_sixths_collapses_to_zero(self):
        form = reduce_to_coprime(mod1(5, 6), 2, 3)
        assert (form.s, form.t, form.witness) == (0, 1, (1, 1))

    def test_already_coprime(self):
        form = reduce_to_coprime(mod1(1, 7), 2, 3)
        assert (form.s, form.t, form.witness) == (1, 7, (0, 0))

    def test_witness_reaches_form_and_t_matches_oracle(self):
        rng = random.Random(2)
        for _ in range(200):
            den = rng.randrange(2, 5000)
            num = rng.randrange(0, den)
            p, q = rng.choice([(2, 3), (2, 5), (6, 10), (3, 4)])
            x = mod1(num, den)
            form = reduce_to_coprime(x, p, q)
            assert math.gcd(form.t, p * q) == 1
            assert math.gcd(form.s, form.t) == 1
            # witness exponents actually carry x onto s/t
            a, b = form.witness
            moved = (x.as_fraction() * p ** a * q ** b) % 1
            assert moved == Fraction(form.s, form.t)
            # the reduced denominator is the pq-free part of the original
            assert form.t == oracle_coprime_part(x.den, p, q)


class TestMultiplicativeOrbit:
    def test_orbit_of_one_mod_five(self):
        assert multiplicative_orbit(1, 5, 2, 3) == oracle_orbit(1, 5, 2, 3)
        assert multiplicative_orbit(1, 5, 2, 3) == {1, 2, 3, 4}

    def test_zero_is_fixed(self):
        assert multiplicative_orbit(0, 5, 2, 3) == {0}

    def test_full_group_mod_seven(self):
        assert multiplicative_orbit(1, 7, 2, 3) == {1, 2, 3, 4, 5, 6}
        assert multiplicative_orbit(1, 7, 2, 3) == oracle_orbit(1, 7, 2, 3)

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(4)
        for _ in range(50):
            s = rng.choice([5, 7, 11, 13, 25, 35, 49, 55, 77, 121])
            seed = rng.randrange(0, s)
            assert multiplicative_orbit(seed, s, 2, 3) == oracle_orbit(seed, s, 2, 3)

    def test_orbits_partition_residues(self):
        for s in (5, 7, 25, 35, 143):
            seen: dict = {}
            for seed in range(s):
                orb = multiplicative_orbit(seed, s, 2, 3)
                for other_seed, other in seen.items():
                    assert orb == other or not (orb & other), \
                        f"orbits of {seed} and {other_seed} overlap mod {s}"
                seen[seed] = orb
            assert set().union(*seen.values()) == set(range(s))

    def test_rejects_bad_modulus(self):
        with pytest.raises(ValueError):
            multiplicative_orbit(1, 6, 2, 3)


class TestBuildAtomicMeasure:
    def test_uniform_on_fifths(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        assert m.modulus == 5
        assert m.support == {1, 2, 3, 4}
        assert all(w == Fraction(1, 4) for _, w in m.weights)

    def test_dirac_at_zero(self):
        m = build_atomic_measure(mod1(0, 1), 2, 3)
        assert m.modulus == 1
        assert m.atoms() == [(mod1(0, 1), Fraction(1))]

    def test_three_twentieths_reduces_into_fifths(self):
        m = build_atomic_measure(mod1(3, 20), 2, 3)
        assert m.modulus == 5 and m.support == {1, 2, 3, 4}

    def test_closure_invariant_enforced(self):
        with pytest.raises(ValueError):
            AtomicMeasure(5, ((1, Fraction(1, 2)), (2, Fraction(1, 2))), 2, 3)


class TestPushforward:
    def test_times_two_permutes_fifths(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        assert pushforward_times_n(m, 2) == m

    def test_dirac_fixed_by_everything(self):
        m = build_atomic_measure(mod1(0, 1), 2, 3)
        assert pushforward_times_n(m, 7) == m

    def test_times_three_permutes_sevenths(self):
        m = build_atomic_measure(mod1(1, 7), 2, 3)
        assert pushforward_times_n(m, 3) == m

    def test_invariance_under_semigroup(self):
        rng = random.Random(6)
        p, q = 2, 3
        for _ in range(100):
            den = rng.randrange(2, 10**4)
            num = rng.randrange(0, den)
            m = build_atomic_measure(mod1(num, den), p, q)
            for n in (p, q, p * q, p * p, q * q):
                assert pushforward_times_n(m, n) == m

    def test_collapsing_pushforward_merges_weights(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        collapsed = pushforward_times_n(m, 5)
        assert collapsed.weight_map() == {0: Fraction(1)}


class TestMeasureMoment:
    def test_minus_quarter(self):
        # oracle: the four nontrivial fifth roots of unity sum to -1
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        z = measure_moment(m, 1)
        assert abs(z - (-0.25)) < 1e-12

    def test_total_mass(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        assert measure_moment(m, 0) == 1

    def test_dirac(self):
        m = build_atomic_measure(mod1(0, 1), 2, 3)
        assert measure_moment(m, 3) == 1

    def test_total_mass_exact_for_third_weights(self):
        # orbit of 1 under x2, x11 mod 7 is {1, 2, 4}: weights are thirds,
        # which do not sum to 1.0 in naive float accumulation
        m = build_atomic_measure(mod1(1, 7), 2, 11)
        assert m.support == {1, 2, 4}
        assert measure_moment(m, 0) == 1

    def test_frequency_multiple_of_modulus_pools_exactly(self):
        m = build_atomic_measure(mod1(1, 7), 2, 11)
        assert measure_moment(m, 7) == 1

    def test_fourier_form_invariance_is_exact(self):
        # bit-exact equality of mu(z^k) with mu(z^{kp}) and mu(z^{kq})
        rng = random.Random(8)
        for _ in range(30):
            den = rng.randrange(2, 2000)
            m = build_atomic_measure(mod1(rng.randrange(0, den), den), 2, 3)
            for k in (1, 2, 5):
                zk = measure_moment(m, k)
                assert measure_moment(m, k * 2) == zk
                assert measure_moment(m, k * 3) == zk


class TestGenericPointCheck:
    def test_dirac_gap_zero(self):
        m = build_atomic_measure(mod1(0, 1), 2, 3)
        rep = generic_point_check(mod1(0, 1), m, 1, 16)
        assert rep.gap == 0 and not rep.exploratory

    def test_fifths_at_large_n(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        rep = generic_point_check(mod1(1, 5), m, 1, 512)
        assert rep.gap <= 0.02
        assert abs(rep.target - (-0.25)) < 1e-12

    def test_aligned_frequency_gap_zero(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        rep = generic_point_check(mod1(1, 5), m, 5, 8)
        assert rep.gap < 1e-15

    def test_orbit_translate_agrees(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        a = generic_point_check(mod1(1, 5), m, 1, 512)
        b = generic_point_check(mod1(2, 5), m, 1, 512)
        assert a.gap <= 0.02 and b.gap <= 0.02
        assert abs(a.gap - b.gap) <= 0.02

    def test_exploratory_flag(self):
        m = build_atomic_measure(mod1(1, 5), 2, 3)
        rep = generic_point_check(mod1(1, 7), m, 1, 8)
        assert rep.exploratory
