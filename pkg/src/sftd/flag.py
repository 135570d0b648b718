"""Persistence of the flag (clique) complex of a filtration matrix."""

from __future__ import annotations

import numpy as np

from ._reduction import persistence_pairs
from .core import Bar, Barcode, FieldError, FiltrationMatrix, make_barcode


def enumerate_cliques(adjacency: list[np.ndarray], n: int, max_size: int) -> list[np.ndarray]:
    """All cliques with up to ``max_size`` vertices, grouped by size.

    ``adjacency[v]`` lists the neighbours of ``v`` greater than ``v`` in
    ascending order. Each group is an ``(m, size)`` array of sorted vertex
    tuples in lexicographic order.
    """
    groups = [[] for _ in range(max_size)]
    nbr_sets = [set(a.tolist()) for a in adjacency]

    def extend(clique, candidates):
        groups[len(clique) - 1].append(clique)
        if len(clique) == max_size:
            return
        for i, w in enumerate(candidates):
            extend(clique + (w,), [u for u in candidates[i + 1:] if u in nbr_sets[w]])

    for v in range(n):
        extend((v,), adjacency[v].tolist())
    out = []
    for size, g in enumerate(groups, 1):
        arr = np.array(sorted(g), dtype=np.int64).reshape(-1, size)
        out.append(arr)
    return out


def _simplex_values(m: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    vals = m[simplices, simplices].max(axis=1) if simplices.size else np.empty(0)
    k = simplices.shape[1]
    for a in range(k):
        for b in range(a + 1, k):
            vals = np.maximum(vals, m[simplices[:, a], simplices[:, b]])
    return vals


def peak_vertex(m: np.ndarray, simplex) -> int:
    """Vertex attaining the simplex value, smallest index on ties.

    When only an edge attains the value, the smaller endpoint of the
    lexicographically first such edge is returned.
    """
    simplex = tuple(simplex)
    value = max(
        max(m[v, v] for v in simplex),
        max((m[a, b] for i, a in enumerate(simplex) for b in simplex[i + 1:]), default=-np.inf),
    )
    for v in simplex:
        if m[v, v] == value:
            return v
    for i, a in enumerate(simplex):
        for b in simplex[i + 1:]:
            if m[a, b] == value:
                return a
    raise AssertionError("simplex value not attained")


def _encode(simplices: np.ndarray, n: int) -> np.ndarray:
    code = np.zeros(simplices.shape[0], np.int64)
    for a in range(simplices.shape[1]):
        code = code * n + simplices[:, a]
    return code


def flag_persistence(matrix: FiltrationMatrix, max_dim: int) -> Barcode:
    """Barcode of the clique filtration of ``matrix`` in degrees 0..max_dim.

    A simplex enters at the max of its vertex and edge entries; simplices
    containing an infinite edge are absent. Ties are broken by dimension,
    then lexicographically by sorted vertex tuple.
    """
    m = matrix.entries
    n = matrix.size
    # a single vertex still has its degree-0 barcode
    if max_dim < 0 or max_dim + 1 > max(n - 1, 1):
        raise FieldError(f"max_dim={max_dim} too large for a {n}x{n} matrix")
    finite = np.isfinite(m)
    adjacency = [np.flatnonzero(finite[v, v + 1:]) + v + 1 for v in range(n)]
    groups = enumerate_cliques(adjacency, n, max_dim + 2)

    simplices, values, codes = [], [], []
    for s in groups:
        vals = _simplex_values(m, s)
        order = np.argsort(vals, kind="stable")
        simplices.append(s[order])
        values.append(vals[order])
        codes.append(_encode(s[order], n))

    vertex_pos = np.empty(n, np.int64)
    vertex_pos[simplices[0][:, 0]] = np.arange(n)
    edge_ends = vertex_pos[simplices[1]] if simplices[1].size else np.empty((0, 2), np.int64)

    boundaries = {}
    for k in range(2, max_dim + 2):
        s = simplices[k]
        prev_codes = codes[k - 1]
        lookup = np.argsort(prev_codes)
        cols = []
        for drop in range(k + 1):
            facet = np.delete(s, drop, axis=1)
            fc = _encode(facet, n)
            cols.append(lookup[np.searchsorted(prev_codes, fc, sorter=lookup)])
        col_idx = np.sort(np.stack(cols, axis=1), axis=1).ravel() if s.size else np.empty(0, np.int64)
        col_ptr = np.arange(s.shape[0] + 1, dtype=np.int64) * (k + 1)
        boundaries[k] = (col_ptr, col_idx.astype(np.int64))

    pairs, essential = persistence_pairs(n, edge_ends, boundaries, max_dim)

    bars, ess = [], []
    for k in range(max_dim + 1):
        for bp, dp in pairs[k]:
            birth, death = values[k][bp], values[k + 1][dp]
            if death <= birth:
                continue
            bs = tuple(int(v) for v in simplices[k][bp])
            ds = tuple(int(v) for v in simplices[k + 1][dp])
            bars.append(Bar(k, float(birth), float(death), peak_vertex(m, bs), peak_vertex(m, ds), bs, ds))
        for p in essential[k]:
            bs = tuple(int(v) for v in simplices[k][p])
            ess.append(Bar(k, float(values[k][p]), float("inf"), peak_vertex(m, bs), None, bs, None))
    return make_barcode(bars, ess, max_dim)
