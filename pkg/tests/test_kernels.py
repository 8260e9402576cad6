import random
from fractions import Fraction

import numpy as np
import pytest

from timespq import kernels
from timespq.cantor import cantor_fraction

try:
    _numba_kernels = kernels._build_numba_kernels()
except ImportError:  # pragma: no cover - numba is an install-time dependency
    _numba_kernels = None

IMPLS = {"numpy": (kernels._cantor_values_numpy, kernels._phases_numpy,
                   kernels._pav_l2_numpy)}
if _numba_kernels is not None:
    IMPLS["numba"] = _numba_kernels


def oracle_pav(y):
    """Quadratic-time pooling: merge adjacent violating blocks to their
    weighted mean until the block means are nondecreasing."""
    blocks = [[v, 1] for v in y]
    changed = True
    while changed:
        changed = False
        for i in range(len(blocks) - 1):
            if blocks[i][0] > blocks[i + 1][0]:
                v1, w1 = blocks[i]
                v2, w2 = blocks[i + 1]
                blocks[i] = [(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2]
                del blocks[i + 1]
                changed = True
                break
    out = []
    for v, w in blocks:
        out.extend([v] * int(w))
    return np.array(out)


@pytest.mark.parametrize("impl", sorted(IMPLS), ids=sorted(IMPLS))
class TestPerBackend:
    def test_cantor_values_match_exact(self, impl):
        cantor_impl = IMPLS[impl][0]
        rng = random.Random(1)
        for _ in range(60):
            den = rng.randrange(2, 3000)
            nums = np.array([rng.randrange(0, den + 1) for _ in range(40)],
                            dtype=np.int64)
            got = cantor_impl(nums, np.int64(den), np.int64(64))
            for n, g in zip(nums, got):
                exact = float(cantor_fraction(Fraction(int(n), den)))
                assert abs(g - exact) <= 2 ** -52

    def test_phase_quarters_exact(self, impl):
        phases_impl = IMPLS[impl][1]
        got = phases_impl(np.array([0, 1, 2, 3], dtype=np.int64),
                          np.int64(1), np.int64(4))
        assert list(got) == [1, 1j, -1, -1j]

    def test_pav_spec_examples(self, impl):
        pav_impl = IMPLS[impl][2]
        got = pav_impl(np.array([0.0, 0.6, 0.4, 1.0]))
        assert np.array_equal(got, [0.0, 0.5, 0.5, 1.0])
        got = pav_impl(np.array([0.0, 1.0, 0.0, 1.0]))
        assert np.array_equal(got, [0.0, 0.5, 0.5, 1.0])

    def test_pav_against_oracle(self, impl):
        pav_impl = IMPLS[impl][2]
        rng = np.random.default_rng(7)
        for _ in range(40):
            y = rng.standard_normal(rng.integers(1, 60))
            got = pav_impl(y.astype(np.float64))
            want = oracle_pav(list(y))
            assert np.allclose(got, want, atol=1e-12)
            assert np.all(np.diff(got) >= -1e-15)

    def test_pav_monotone_input_untouched(self, impl):
        pav_impl = IMPLS[impl][2]
        y = np.array([0.0, 0.25, 0.25, 0.7, 1.0])
        assert np.array_equal(pav_impl(y), y)


@pytest.mark.skipif(_numba_kernels is None, reason="numba unavailable")
class TestBackendAgreement:
    def test_cantor_bit_identical(self):
        nums = np.arange(2 * 3 ** 8 + 1, dtype=np.int64)
        den = np.int64(2 * 3 ** 8)
        a = kernels._cantor_values_numpy(nums, den, np.int64(64))
        b = _numba_kernels[0](nums, den, np.int64(64))
        assert np.array_equal(a, b)

    def test_pav_bit_identical(self):
        rng = np.random.default_rng(3)
        y = rng.standard_normal(4000)
        a = kernels._pav_l2_numpy(y)
        b = _numba_kernels[2](y)
        assert np.array_equal(a, b)

    def test_phases_within_one_ulp(self):
        res = np.arange(10000, dtype=np.int64) % 997
        a = kernels._phases_numpy(res, np.int64(5), np.int64(997))
        b = _numba_kernels[1](res, np.int64(5), np.int64(997))
        assert np.max(np.abs(a - b)) < 5e-16


class TestWrappers:
    def test_cantor_values_endpoint(self):
        got = kernels.cantor_values(np.array([0, 9, 18], dtype=np.int64), 18)
        assert got[0] == 0.0 and got[2] == 1.0
        assert got[1] == 0.5  # 9/18 = 1/2

    def test_cantor_values_range_checks(self):
        with pytest.raises(ValueError):
            kernels.cantor_values(np.array([5], dtype=np.int64), 4)
        with pytest.raises(ValueError):
            kernels.cantor_values(np.array([0], dtype=np.int64), 1 << 40)

    def test_backend_name_exposed(self):
        assert kernels.BACKEND in ("numba", "numpy")


class TestPairwiseSum:
    def test_matches_plain_sum(self):
        rng = np.random.default_rng(11)
        z = rng.standard_normal(5000) + 1j * rng.standard_normal(5000)
        got = kernels.pairwise_sum(z)
        assert abs(got - np.sum(z)) < 1e-9

    def test_block_structure_independent_of_split(self):
        # summing a concatenation equals merging per-part results computed
        # on block boundaries, which is what the row dispatch relies on
        rng = np.random.default_rng(13)
        z = rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
        whole = kernels.pairwise_sum(z)
        rows = [kernels.pairwise_sum(z[i:i + 1024]) for i in range(0, 4096, 1024)]
        merged = kernels.pairwise_sum(np.array(rows))
        assert whole == merged

    def test_empty(self):
        assert kernels.pairwise_sum(np.array([], dtype=np.complex128)) == 0

    def test_repeated_runs_bit_identical(self):
        rng = np.random.default_rng(17)
        z = rng.standard_normal(3000)
        assert kernels.pairwise_sum(z) == kernels.pairwise_sum(z.copy())
