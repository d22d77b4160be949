import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from biphase import Basis, StateVector

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260816)


def random_amplitudes(rng: np.random.Generator) -> np.ndarray:
    raw = rng.normal(size=3) + 1j * rng.normal(size=3)
    return raw / np.linalg.norm(raw)


def random_state(rng: np.random.Generator, basis: Basis = Basis.PMZ) -> StateVector:
    return StateVector.normalized(random_amplitudes(rng), basis)
