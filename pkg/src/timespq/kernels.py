"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time from the environment variable
``TIMESPQ_BACKEND``:

* unset or ``auto`` -- use numba when it is importable, else numpy
* ``numba``         -- require numba (ImportError if missing)
* ``numpy``         -- force the pure-numpy implementations

Both implementations of each kernel perform the same elementwise float
operations in the same order, so ``cantor_values`` and ``pav_l2`` are
bit-identical across backends.  The trig kernels may differ by an ulp
between libm builds; they agree exactly at quarter turns.
"""

from __future__ import annotations

import os

import numpy as np

_QUARTER_TURNS = np.array([1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j])


# ---------------------------------------------------------------------------
# pure-numpy implementations

def _cantor_values_numpy(nums: np.ndarray, den: int, max_digits: int) -> np.ndarray:
    num = nums.astype(np.int64).copy()
    out = np.zeros(num.shape[0], dtype=np.float64)
    out[num >= den] = 1.0
    active = (num > 0) & (num < den)
    scale = 1.0
    for _ in range(max_digits):
        if not active.any():
            break
        scale *= 0.5
        num[active] *= 3
        digit = num // den
        num -= digit * den
        hit_one = active & (digit == 1)
        out[hit_one] += scale
        out[active & (digit == 2)] += scale
        active &= ~hit_one & (num > 0)
    return out


def _phases_numpy(residues: np.ndarray, k: int, den: int) -> np.ndarray:
    kk = k % den
    m = (kk * residues) % den
    num4 = 4 * m
    c = (2 * num4 + den) // (2 * den)
    rem = num4 - c * den
    theta = (np.pi / 2.0) * (rem.astype(np.float64) / den)
    z = np.cos(theta) + 1j * np.sin(theta)
    return z * _QUARTER_TURNS[c & 3]


def _pav_l2_numpy(y: np.ndarray) -> np.ndarray:
    n = y.shape[0]
    if n <= 1 or bool(np.all(y[1:] >= y[:-1])):
        return y.copy()
    vals = np.empty(n, dtype=np.float64)
    wts = np.empty(n, dtype=np.float64)
    top = 0
    for i in range(n):
        cv = y[i]
        cw = 1.0
        while top > 0 and vals[top - 1] > cv:
            cv = (vals[top - 1] * wts[top - 1] + cv * cw) / (wts[top - 1] + cw)
            cw += wts[top - 1]
            top -= 1
        vals[top] = cv
        wts[top] = cw
        top += 1
    out = np.empty(n, dtype=np.float64)
    pos = 0
    for b in range(top):
        cnt = int(wts[b] + 0.5)
        out[pos:pos + cnt] = vals[b]
        pos += cnt
    return out


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily at import when the backend allows)

def _build_numba_kernels():
    from numba import njit

    @njit(cache=True)
    def cantor_values(nums, den, max_digits):
        out = np.empty(nums.shape[0], dtype=np.float64)
        for i in range(nums.shape[0]):
            num = nums[i]
            if num >= den:
                out[i] = 1.0
                continue
            v = 0.0
            scale = 1.0
            for _ in range(max_digits):
                num *= 3
                digit = num // den
                num -= digit * den
                scale *= 0.5
                if digit == 1:
                    v += scale
                    break
                if digit == 2:
                    v += scale
                if num == 0:
                    break
            out[i] = v
        return out

    @njit(cache=True)
    def phases(residues, k, den):
        out = np.empty(residues.shape[0], dtype=np.complex128)
        kk = k % den
        if kk < 0:
            kk += den
        for i in range(residues.shape[0]):
            m = (kk * residues[i]) % den
            num4 = 4 * m
            c = (2 * num4 + den) // (2 * den)
            rem = num4 - c * den
            theta = (np.pi / 2.0) * (rem / den)
            z = complex(np.cos(theta), np.sin(theta))
            q = c & 3
            if q == 1:
                z = complex(-z.imag, z.real)
            elif q == 2:
                z = -z
            elif q == 3:
                z = complex(z.imag, -z.real)
            out[i] = z
        return out

    @njit(cache=True)
    def pav_l2(y):
        n = y.shape[0]
        monotone = True
        for i in range(1, n):
            if y[i] < y[i - 1]:
                monotone = False
                break
        if monotone:
            return y.copy()
        vals = np.empty(n, dtype=np.float64)
        wts = np.empty(n, dtype=np.float64)
        top = 0
        for i in range(n):
            cv = y[i]
            cw = 1.0
            while top > 0 and vals[top - 1] > cv:
                cv = (vals[top - 1] * wts[top - 1] + cv * cw) / (wts[top - 1] + cw)
                cw += wts[top - 1]
                top -= 1
            vals[top] = cv
            wts[top] = cw
            top += 1
        out = np.empty(n, dtype=np.float64)
        pos = 0
        for b in range(top):
            cnt = int(wts[b] + 0.5)
            for j in range(cnt):
                out[pos + j] = vals[b]
            pos += cnt
        return out

    return cantor_values, phases, pav_l2


def _pick_backend() -> str:
    want = os.environ.get("TIMESPQ_BACKEND", "auto").strip().lower() or "auto"
    if want not in ("auto", "numba", "numpy"):
        raise ValueError(f"TIMESPQ_BACKEND must be auto, numba or numpy, got {want!r}")
    if want == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if want == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _pick_backend()

if BACKEND == "numba":
    _cantor_impl, _phases_impl, _pav_impl = _build_numba_kernels()
else:
    _cantor_impl, _phases_impl, _pav_impl = (
        _cantor_values_numpy, _phases_numpy, _pav_l2_numpy)

# largest denominator for which 3*num and k*res stay inside int64
MAX_KERNEL_DEN = 1 << 31


def cantor_values(nums, den: int, max_digits: int = 64) -> np.ndarray:
    """Cantor-function values at ``nums[i] / den``, float64.

    Requires 0 <= nums[i] <= den < 2**31; entries equal to ``den`` map to 1.
    Digits beyond ``max_digits`` are dropped, bounding the result below the
    true value by at most 2**-max_digits.
    """
    arr = np.ascontiguousarray(nums, dtype=np.int64)
    if not 0 < den < MAX_KERNEL_DEN:
        raise ValueError(f"denominator {den} outside kernel range")
    if arr.size and (arr.min() < 0 or arr.max() > den):
        raise ValueError("numerators must lie in [0, den]")
    return _cantor_impl(arr, np.int64(den), np.int64(max_digits))


def unit_phases(residues, k: int, den: int) -> np.ndarray:
    """e(k * r / den) for each residue r, exact at quarter turns."""
    arr = np.ascontiguousarray(residues, dtype=np.int64)
    if not 0 < den < MAX_KERNEL_DEN:
        raise ValueError(f"denominator {den} outside kernel range")
    return _phases_impl(arr, np.int64(k % den), np.int64(den))


def pav_l2(y) -> np.ndarray:
    """Least-squares isotonic regression (pool adjacent violators).

    Monotone input is returned unchanged (a copy, no arithmetic applied).
    """
    arr = np.ascontiguousarray(y, dtype=np.float64)
    return _pav_impl(arr)


# ---------------------------------------------------------------------------
# deterministic reduction (shared by both backends)

PAIRWISE_BLOCK = 1024


def pairwise_sum(values: np.ndarray):
    """Deterministic blocked pairwise sum.

    Arrays up to 1024 entries are a single np.sum leaf; longer arrays reduce
    their 1024-aligned block sums with the same rule recursively.  The
    reduction tree therefore depends only on the array length, so results
    are bit-identical across runs, and summing 1024-aligned chunks
    separately and then reducing the partials reproduces the whole-array
    result exactly.
    """
    arr = np.asarray(values)
    n = arr.shape[0]
    if n == 0:
        return arr.dtype.type(0).item()
    if n <= PAIRWISE_BLOCK:
        return np.sum(arr).item()
    parts = np.array([np.sum(arr[i:i + PAIRWISE_BLOCK])
                      for i in range(0, n, PAIRWISE_BLOCK)])
    return pairwise_sum(parts)
