"""Shared helpers: random connected graphs with controlled weight ranges."""

import numpy as np

from yamabe import WeightedGraph


def random_connected_graph(rng, n_max=30, n_min=2):
    """Random connected graph with weights in (0, 2] and measure in (0.1, 2].

    A random spanning tree guarantees connectedness; extra edges are
    sprinkled on top and deduplicated.
    """
    n = int(rng.integers(n_min, n_max + 1))
    seen = set()
    edges = []

    def add(x, y):
        key = (min(x, y), max(x, y))
        if x == y or key in seen:
            return
        seen.add(key)
        # 2 - U[0, 2) lands in (0, 2]
        edges.append((key[0], key[1], 2.0 - float(rng.uniform(0.0, 2.0))))

    for v in range(1, n):
        add(int(rng.integers(0, v)), v)
    for _ in range(int(rng.integers(0, n + 1))):
        add(int(rng.integers(0, n)), int(rng.integers(0, n)))
    mu = 2.0 - rng.uniform(0.0, 1.9, size=n)
    return WeightedGraph.from_edges(n, edges, mu=mu)


def random_positive_spec_fields(rng, n):
    """Positive h and nonnegative g with a guaranteed positive entry."""
    h = np.exp(rng.uniform(-1.0, 1.0, n))
    g = np.maximum(rng.uniform(-0.5, 1.5, n), 0.0)
    g[int(rng.integers(0, n))] = 1.0
    return h, g
