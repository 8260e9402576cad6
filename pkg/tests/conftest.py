import numpy as np
import pytest

from timespq import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation before any timed assertion runs."""
    kernels.cantor_values(np.arange(4, dtype=np.int64), 9)
    kernels.unit_phases(np.arange(4, dtype=np.int64), 1, 5)
    kernels.pav_l2(np.array([0.0, 1.0, 0.5, 1.0]))
    kernels.pairwise_sum(np.ones(3, dtype=np.complex128))
