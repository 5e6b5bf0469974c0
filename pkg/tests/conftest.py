import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dirgnn import DirectedGraph

settings.register_profile(
    "suite", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


def random_digraph(rng: np.random.Generator, n: int, p: float) -> DirectedGraph:
    """Erdos-Renyi digraph without self-loops."""
    mask = (rng.random((n, n)) < p) & ~np.eye(n, dtype=bool)
    return DirectedGraph.from_edge_list(np.argwhere(mask), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
