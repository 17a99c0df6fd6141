import numpy as np
import pytest

from qslearn.sim import kernels


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    """Each importable kernel module in turn."""
    return kernels.available_backends()[request.param]


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)
