import numpy as np
import pytest

from mfshift.model import LevelMap, ModelSpec, PotentialTable


@pytest.fixture
def quarter_spec():
    """p = (1/4, 3/4) on the dyadic full shift; the workhorse example."""
    return ModelSpec(ratios=[0.5, 0.5], measures=[[0.25, 0.75]], label="quarter")


@pytest.fixture
def uniform_spec():
    return ModelSpec(ratios=[0.5, 0.5], measures=[[0.5, 0.5]], label="uniform")


@pytest.fixture
def golden_spec():
    """Ratios (1/2, 1/4): Moran root log2((1+sqrt 5)/2)."""
    return ModelSpec(ratios=[0.5, 0.25], measures=[[0.25, 0.75]], label="golden")


@pytest.fixture
def ternary_spec():
    return ModelSpec(
        ratios=[1 / 3, 1 / 3, 1 / 3], measures=[[0.2, 0.3, 0.5]], label="ternary"
    )


@pytest.fixture
def depth2_level(quarter_spec):
    """Level map with a genuinely tail-sensitive depth-2 numerator."""
    eps = 0.05
    phi2 = PotentialTable(
        quarter_spec.log_measures[0][:, None] + eps * np.eye(2)
    )
    lam = PotentialTable(quarter_spec.log_ratios)
    return LevelMap((phi2,), lam)


def zero_potential(spec):
    return PotentialTable(np.zeros(spec.N))


def scaling_potential(spec):
    return PotentialTable(spec.log_ratios)
