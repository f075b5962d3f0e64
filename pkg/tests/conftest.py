import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_graph(n, edges):
    """Shorthand Multigraph builder for literal edge lists."""
    from nearcrit.multigraph import Multigraph

    return Multigraph(n, edges)


def theta_graph():
    """Two degree-3 hubs joined by paths of lengths 2, 3, 4 (9 vertices).

    hub a=0, hub b=1; path2: 0-2-1; path3: 0-3-4-1; path4: 0-5-6-7-1.
    """
    edges = [
        (0, 2), (2, 1),
        (0, 3), (3, 4), (4, 1),
        (0, 5), (5, 6), (6, 7), (7, 1),
    ]
    return make_graph(8, edges)
