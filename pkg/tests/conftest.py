import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hypercut import EdvwHypergraph, GKind, HKind, SubmodularWeightSpec

settings.register_profile(
    "ci", deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture
def h0() -> EdvwHypergraph:
    """Running example: one hyperedge over three vertices, gamma = (1, 2, 3)."""
    return EdvwHypergraph(3, [[0, 1, 2]], [[1.0, 2.0, 3.0]], [1.0])


@pytest.fixture
def spec_clique() -> SubmodularWeightSpec:
    return SubmodularWeightSpec(HKind.IDENTITY, GKind.CLIQUE)


@pytest.fixture
def spec_minsplit() -> SubmodularWeightSpec:
    return SubmodularWeightSpec(HKind.CONSTANT_ONE, GKind.MIN_SPLIT)


def random_subset(rng: np.random.Generator, n: int) -> np.ndarray:
    mask = rng.random(n) < 0.5
    return mask
