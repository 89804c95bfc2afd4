import math
import random

import pytest

from curvlink.metric_graph import MetricGraph


def random_multigraph(rng, max_vertices=10, max_edges=18, lo=0.1, hi=4.0, loops=True):
    n = rng.randint(1 if loops else 2, max_vertices)
    edges = []
    for _ in range(rng.randint(0, max_edges)):
        u = rng.randrange(n)
        v = rng.randrange(n) if loops else rng.choice([w for w in range(n) if w != u])
        edges.append((u, v, rng.uniform(lo, hi)))
    return MetricGraph(range(n), edges)


@pytest.fixture
def rng():
    return random.Random(20240611)


def deg(x):
    return math.radians(x)
