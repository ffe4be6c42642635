import numpy as np
import pytest

from fracbs import FractionalParams, FunctionProfile, polyharmonic


@pytest.fixture(scope="session")
def phs3():
    return polyharmonic(3)


@pytest.fixture(scope="session")
def paper_params():
    """sigma, rate and dt used by both benchmark examples."""
    return FractionalParams(alpha=1.0, beta=1.0, sigma=0.25, rate=0.05, dt=1.0 / 25.0)


def monomial_profile(mu: int) -> FunctionProfile:
    """t^mu with analytic first and second derivatives, vectorized."""
    ones = lambda t: np.ones_like(np.asarray(t, dtype=float))
    zeros = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    if mu == 0:
        return FunctionProfile(ones, zeros, zeros)
    if mu == 1:
        return FunctionProfile(lambda t: np.asarray(t, float), ones, zeros)
    return FunctionProfile(
        lambda t: np.asarray(t, float) ** mu,
        lambda t: mu * np.asarray(t, float) ** (mu - 1),
        lambda t: mu * (mu - 1) * np.asarray(t, float) ** (mu - 2),
    )
