import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def naive_dft(x, n=None, sign=-1):
    """O(n^2) double-sum DFT used as an independent oracle."""
    x = np.asarray(x, dtype=complex)
    n = x.size if n is None else n
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        for m in range(x.size):
            out[k] += x[m] * np.exp(sign * 2j * np.pi * k * m / n)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
