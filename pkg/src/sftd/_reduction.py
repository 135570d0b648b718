"""Sparse Z/2 column reduction shared by the flag and cubical engines.

Cells of one dimension are identified by their position in the filtration
order of that dimension. A boundary matrix is given column-wise in CSR form
(``col_ptr``, ``col_idx``) with the row positions of each column sorted
ascending, so the pivot of a column is its last entry.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _xor_sorted(a, la, b, lb, out):
    i = 0
    j = 0
    k = 0
    while i < la and j < lb:
        x = a[i]
        y = b[j]
        if x < y:
            out[k] = x
            i += 1
            k += 1
        elif y < x:
            out[k] = y
            j += 1
            k += 1
        else:
            i += 1
            j += 1
    while i < la:
        out[k] = a[i]
        i += 1
        k += 1
    while j < lb:
        out[k] = b[j]
        j += 1
        k += 1
    return k


@njit(cache=True)
def reduce_boundary(col_ptr, col_idx, n_rows, skip):
    """Standard column reduction with clearing.

    Returns ``(pivot, owner)``: ``pivot[j]`` is the low row of the reduced
    column ``j`` (-1 when it reduces to zero or is skipped) and ``owner[r]``
    is the column whose pivot is row ``r`` (-1 if none).
    """
    n_cols = col_ptr.shape[0] - 1
    pivot = np.full(n_cols, -1, np.int64)
    owner = np.full(n_rows, -1, np.int64)

    # reduced columns that differ from the original boundary
    red_start = np.full(n_cols, -1, np.int64)
    red_len = np.zeros(n_cols, np.int64)
    arena = np.empty(max(16, col_idx.shape[0]), col_idx.dtype)
    arena_used = 0

    cap = 64
    buf_a = np.empty(cap, col_idx.dtype)
    buf_b = np.empty(cap, col_idx.dtype)

    for j in range(n_cols):
        if skip[j]:
            continue
        s = col_ptr[j]
        la = col_ptr[j + 1] - s
        if la > cap:
            cap = 2 * la
            buf_a = np.empty(cap, col_idx.dtype)
            buf_b = np.empty(cap, col_idx.dtype)
        for t in range(la):
            buf_a[t] = col_idx[s + t]
        modified = False
        while la > 0:
            low = buf_a[la - 1]
            o = owner[low]
            if o < 0:
                break
            if red_start[o] >= 0:
                src = arena[red_start[o]:red_start[o] + red_len[o]]
            else:
                src = col_idx[col_ptr[o]:col_ptr[o + 1]]
            lb = src.shape[0]
            if la + lb > cap:
                cap = 2 * (la + lb)
                tmp = np.empty(cap, col_idx.dtype)
                tmp[:la] = buf_a[:la]
                buf_a = tmp
                buf_b = np.empty(cap, col_idx.dtype)
            la = _xor_sorted(buf_a, la, src, lb, buf_b)
            buf_a, buf_b = buf_b, buf_a
            modified = True
        if la == 0:
            continue
        low = buf_a[la - 1]
        owner[low] = j
        pivot[j] = low
        if modified:
            if arena_used + la > arena.shape[0]:
                grown = np.empty(2 * (arena_used + la), col_idx.dtype)
                grown[:arena_used] = arena[:arena_used]
                arena = grown
            arena[arena_used:arena_used + la] = buf_a[:la]
            red_start[j] = arena_used
            red_len[j] = la
            arena_used += la
    return pivot, owner


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def union_find_pairs(n_vertices, edge_ends):
    """Elder-rule zero-dimensional pairing.

    ``edge_ends`` holds, for every edge in filtration order, the positions of
    its two endpoints in the vertex order. Returns ``(death_edge, negative)``
    where ``death_edge[v]`` is the edge killing the component born at vertex
    ``v`` (-1 for survivors) and ``negative[e]`` flags edges that merge two
    components. Because roots are always the oldest vertex of a component,
    this is exactly the pairing the standard reduction produces.
    """
    parent = np.arange(n_vertices)
    death_edge = np.full(n_vertices, -1, np.int64)
    negative = np.zeros(edge_ends.shape[0], np.bool_)
    for e in range(edge_ends.shape[0]):
        ru = _find(parent, edge_ends[e, 0])
        rv = _find(parent, edge_ends[e, 1])
        if ru == rv:
            continue
        if ru < rv:
            parent[rv] = ru
            death_edge[rv] = e
        else:
            parent[ru] = rv
            death_edge[ru] = e
        negative[e] = True
    return death_edge, negative


def persistence_pairs(n_vertices, edge_ends, boundaries, max_dim):
    """Pair cells of a filtered complex given per-dimension boundaries.

    ``boundaries[k]`` for ``k >= 2`` is a ``(col_ptr, col_idx)`` pair for the
    k-cells (rows index (k-1)-cells); dimensions may stop anywhere above
    ``max_dim + 1``. Returns ``(pairs, essential)``: ``pairs[k]`` is an
    ``(m, 2)`` array of (birth position among k-cells, death position among
    (k+1)-cells) and ``essential[k]`` the positions of unpaired k-cells that
    never die, for ``k = 0..max_dim``.
    """
    top = max(boundaries) if boundaries else 1
    counts = {0: n_vertices, 1: edge_ends.shape[0]}
    for k, (col_ptr, _) in boundaries.items():
        counts[k] = col_ptr.shape[0] - 1

    pivots = {}
    cleared = None
    for k in range(top, 1, -1):
        col_ptr, col_idx = boundaries[k]
        skip = cleared if cleared is not None else np.zeros(counts[k], np.bool_)
        pivot, _ = reduce_boundary(col_ptr, col_idx, counts[k - 1], skip)
        pivots[k] = pivot
        cleared = np.zeros(counts[k - 1], np.bool_)
        cleared[pivot[pivot >= 0]] = True
        # positive k-cells: zero columns that were not cleared
        pivots[k, "positive"] = (pivot < 0) & ~skip

    death_edge, negative = union_find_pairs(n_vertices, edge_ends)

    pairs = {}
    essential = {}
    alive = death_edge >= 0
    pairs[0] = np.stack([np.flatnonzero(alive), death_edge[alive]], axis=1)
    essential[0] = np.flatnonzero(~alive)
    for k in range(1, max_dim + 1):
        if k == 1:
            positive = ~negative
        else:
            positive = pivots[k, "positive"]
        pivot = pivots.get(k + 1)
        if pivot is None:
            deaths = np.empty(0, np.int64)
            births = np.empty(0, np.int64)
            killed = np.zeros(counts[k], np.bool_)
        else:
            deaths = np.flatnonzero(pivot >= 0)
            births = pivot[deaths]
            killed = np.zeros(counts[k], np.bool_)
            killed[births] = True
        order = np.argsort(births, kind="stable")
        pairs[k] = np.stack([births[order], deaths[order]], axis=1).astype(np.int64)
        essential[k] = np.flatnonzero(positive & ~killed)
    return pairs, essential
