import numpy as np
import pytest

from semigp import Grid2D, SimParams


@pytest.fixture
def grid64():
    return Grid2D(16.0, 64)


@pytest.fixture
def grid32():
    return Grid2D(16.0, 32)


def resonant_U(L: float, eps: float, n=(2, 0)):
    """A velocity whose plane-wave factor is grid periodic."""
    n = np.asarray(n, dtype=float)
    return tuple(2.0 * np.pi * eps * n / L)


@pytest.fixture
def resonant_params():
    L = 16.0
    eps = 0.1
    return SimParams(eps=eps, U_inf=resonant_U(L, eps, (2, 1)),
                     a=(1.0, 0.0), gamma=2.0, T=0.2)
