"""Bottleneck and Wasserstein distances between persistence diagrams.

Both use the L-infinity ground metric: two points are ``max(|db|, |dd|)``
apart and a point is ``(death - birth) / 2`` away from the diagonal.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import Barcode, FieldError


def diagram(points) -> np.ndarray:
    """Validate finite (birth, death) pairs into an ``(m, 2)`` array."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if not np.isfinite(pts).all():
        raise FieldError("diagram points must be finite; drop essential bars first")
    if (pts[:, 1] < pts[:, 0]).any():
        raise FieldError("diagram point with death < birth")
    return pts


def from_barcode(barcode: Barcode, dim: int) -> np.ndarray:
    return diagram(barcode.intervals(dim))


def _costs(a: np.ndarray, b: np.ndarray):
    cross = np.maximum(
        np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1])
    )
    return cross, (a[:, 1] - a[:, 0]) / 2, (b[:, 1] - b[:, 0]) / 2


def _augmented(a, b, power=1.0):
    """Square cost matrix: rows = a + diagonal slots for b, cols = b + slots for a."""
    m, n = len(a), len(b)
    cross, diag_a, diag_b = _costs(a, b)
    cost = np.full((m + n, n + m), np.inf)
    cost[:m, :n] = cross ** power
    cost[:m, n:][np.arange(m), np.arange(m)] = diag_a ** power
    cost[m:, :n][np.arange(n), np.arange(n)] = diag_b ** power
    cost[m:, n:] = 0.0
    return cost


def bottleneck_distance(a, b) -> float:
    """Exact bottleneck distance by binary search over candidate radii."""
    a, b = diagram(a), diagram(b)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    cost = _augmented(a, b)
    size = cost.shape[0]
    candidates = np.unique(cost[np.isfinite(cost)])

    def feasible(r):
        adj = csr_matrix(cost <= r)
        match = maximum_bipartite_matching(adj, perm_type="column")
        return bool((match >= 0).sum() == size)

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def wasserstein_distance(a, b, q: float = 2.0) -> float:
    """q-Wasserstein distance via an optimal assignment on the augmented instance."""
    if not q >= 1:
        raise FieldError(f"q must be >= 1, got {q}")
    a, b = diagram(a), diagram(b)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    cost = _augmented(a, b, q)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() ** (1.0 / q))
