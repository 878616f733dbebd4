import math

import numpy as np
import pytest

from vortexcap.states import solve_gauss_one, solve_gauss_two


@pytest.fixture(scope="session")
def hemisphere():
    """theta0 = pi/2, omega_n = 1, omega_s = -1, non-rotating sphere."""
    return solve_gauss_one(math.pi / 2, -1.0, 0.0)


@pytest.fixture(scope="session")
def symmetric_band():
    """theta1 = pi/3, theta2 = 2pi/3, omega_n = omega_s = 1, omega_c = -1."""
    return solve_gauss_two(math.pi / 3, 2 * math.pi / 3, 1.0, 1.0, 0.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def branch_point(hemisphere):
    """Converged m=2 one-interface branch point at amplitude 0.05."""
    from vortexcap.continuation import branch_one

    branch = branch_one(
        hemisphere, 2, 0.05, 1, modes=10, n_collocation=256, both_signs=False
    )
    return branch.points[-1]
