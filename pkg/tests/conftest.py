import itertools

import numpy as np
from hypothesis import HealthCheck, settings

from sftd.core import FiltrationMatrix, GraphField, ScalarField

settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def random_matrix(rng, n, density, low=0, high=5):
    """Integer-valued filtration matrix: edge value >= both endpoint values."""
    diag = rng.integers(low, high, n).astype(float)
    m = np.full((n, n), np.inf)
    np.fill_diagonal(m, diag)
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < density:
            m[i, j] = m[j, i] = max(diag[i], diag[j]) + rng.integers(0, 3)
    return FiltrationMatrix(m)


def random_graph(rng, n, density):
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def random_graph_pair(rng, n, density, distinct=True):
    """Two functions on one random graph; ``distinct`` makes all 2n values differ."""
    edges = random_graph(rng, n, density)
    if distinct:
        values = rng.permutation(2 * n) / 2.0
        return GraphField(n, edges, values[:n]), GraphField(n, edges, values[n:])
    return GraphField(n, edges, rng.integers(0, 4, n) * 1.0), GraphField(n, edges, rng.integers(0, 4, n) * 1.0)


def random_field(rng, shape, high=5):
    return ScalarField(rng.integers(0, high, shape).astype(float))


def bar_set(barcode, dim=None):
    """Sorted (dim, birth, death) triples of the finite bars."""
    return sorted((b.dim, b.birth, b.death) for b in barcode.bars if dim is None or b.dim == dim)


def full_bars(barcode):
    """Everything the engines promise to agree on, vertices included."""
    return [(b.dim, b.birth, b.death, b.birth_vertex, b.death_vertex) for b in barcode.bars], [
        (b.dim, b.birth, b.birth_vertex) for b in barcode.essential
    ]
