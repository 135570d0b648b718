"""Lower-star persistence of a scalar field on a cubical lattice.

Lattice points are the 0-cells. An elementary k-cube is addressed by its
anchor (minimal corner, C-order linear index) and a bitmask of the k axes
it extends along; its id is ``anchor << ndim | mask``. Within one
dimension cubes are ordered by (value, anchor, mask).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._reduction import persistence_pairs
from .core import Bar, Barcode, FieldError, ScalarField, make_barcode


def _masks(ndim: int, k: int) -> list[int]:
    return [m for m in range(1 << ndim) if bin(m).count("1") == k]


def cube_cells(values: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Ids and values of all k-cubes, sorted in filtration order."""
    ndim = values.ndim
    base = np.arange(values.size, dtype=np.int64).reshape(values.shape)
    ids, vals = [], []
    for mask in _masks(ndim, k):
        v = values
        sl = [slice(None)] * ndim
        for a in range(ndim):
            if mask >> a & 1:
                lo = [slice(None)] * ndim
                hi = [slice(None)] * ndim
                lo[a] = slice(0, -1)
                hi[a] = slice(1, None)
                v = np.maximum(v[tuple(lo)], v[tuple(hi)])
                sl[a] = slice(0, values.shape[a] - 1)
        anchors = base[tuple(sl)].ravel()
        ids.append((anchors << ndim) | mask)
        vals.append(v.ravel())
    if not ids:
        return np.empty(0, np.int64), np.empty(0, np.float64)
    ids = np.concatenate(ids)
    vals = np.concatenate(vals)
    by_id = np.argsort(ids, kind="stable")
    ids, vals = ids[by_id], vals[by_id]
    order = np.argsort(vals, kind="stable")
    return ids[order], vals[order]


@njit(cache=True)
def _boundary_csr(ids, prev_pos, ndim, strides, k):
    n = ids.shape[0]
    width = 2 * k
    col_ptr = np.arange(n + 1) * width
    col_idx = np.empty(n * width, np.int64)
    low_mask = (1 << ndim) - 1
    for c in range(n):
        anchor = ids[c] >> ndim
        mask = ids[c] & low_mask
        base = c * width
        t = 0
        for a in range(ndim):
            if (mask >> a) & 1:
                m2 = mask ^ (1 << a)
                col_idx[base + t] = prev_pos[(anchor << ndim) | m2]
                col_idx[base + t + 1] = prev_pos[((anchor + strides[a]) << ndim) | m2]
                t += 2
        # insertion sort of one short column
        for i in range(base + 1, base + width):
            x = col_idx[i]
            j = i - 1
            while j >= base and col_idx[j] > x:
                col_idx[j + 1] = col_idx[j]
                j -= 1
            col_idx[j + 1] = x
    return col_ptr, col_idx


@njit(cache=True)
def _edge_ends(ids, vertex_pos, ndim, strides):
    out = np.empty((ids.shape[0], 2), np.int64)
    low_mask = (1 << ndim) - 1
    for c in range(ids.shape[0]):
        anchor = ids[c] >> ndim
        mask = ids[c] & low_mask
        a = 0
        while not (mask >> a) & 1:
            a += 1
        out[c, 0] = vertex_pos[anchor << ndim]
        out[c, 1] = vertex_pos[(anchor + strides[a]) << ndim]
    return out


@njit(cache=True)
def _peak_vertices(cell_ids, flat, ndim, strides):
    """Max-valued vertex of each cube, smallest linear index on ties."""
    out = np.empty(cell_ids.shape[0], np.int64)
    low_mask = (1 << ndim) - 1
    for c in range(cell_ids.shape[0]):
        anchor = cell_ids[c] >> ndim
        mask = cell_ids[c] & low_mask
        best = anchor
        sub = mask
        # every submask of the cube's mask names one corner
        while True:
            v = anchor
            for a in range(ndim):
                if (sub >> a) & 1:
                    v += strides[a]
            if flat[v] > flat[best] or (flat[v] == flat[best] and v < best):
                best = v
            if sub == 0:
                break
            sub = (sub - 1) & mask
        out[c] = best
    return out


def _strides(shape) -> np.ndarray:
    strides = np.ones(len(shape), np.int64)
    for a in range(len(shape) - 2, -1, -1):
        strides[a] = strides[a + 1] * shape[a + 1]
    return strides


def cubical_persistence(field: ScalarField, max_dim: int) -> Barcode:
    """Barcode of the lower-star filtration of ``field`` in degrees 0..max_dim."""
    values = field.values
    ndim = values.ndim
    if not 0 <= max_dim <= ndim:
        raise FieldError(f"max_dim={max_dim} outside [0, {ndim}] for a {ndim}-d lattice")
    flat = values.ravel()
    strides = _strides(values.shape)
    id_space = values.size << ndim
    # one extra dimension lets clearing skip the positive columns below it
    top = min(ndim, max_dim + 2)

    cells = [cube_cells(values, 0)]
    boundaries = {}
    prev_pos = np.full(id_space, -1, np.int64)
    prev_pos[cells[0][0]] = np.arange(cells[0][0].size)
    edge_ends = np.empty((0, 2), np.int64)
    for k in range(1, top + 1):
        ids, vals = cube_cells(values, k)
        cells.append((ids, vals))
        if k == 1:
            edge_ends = _edge_ends(ids, prev_pos, ndim, strides)
        else:
            boundaries[k] = _boundary_csr(ids, prev_pos, ndim, strides, k)
        prev_pos.fill(-1)
        prev_pos[ids] = np.arange(ids.size)
    del prev_pos
    for k in range(top + 1, max_dim + 2):
        cells.append((np.empty(0, np.int64), np.empty(0)))
        if k >= 2:
            boundaries[k] = (np.zeros(1, np.int64), np.empty(0, np.int64))

    pairs, essential = persistence_pairs(cells[0][0].size, edge_ends, boundaries, max_dim)

    bars = []
    ess = []
    for k in range(max_dim + 1):
        b_ids, b_vals = cells[k]
        d_ids, d_vals = cells[k + 1]
        pk = pairs[k]
        births = b_vals[pk[:, 0]]
        deaths = d_vals[pk[:, 1]]
        keep = deaths > births
        pk = pk[keep]
        bv = _peak_vertices(b_ids[pk[:, 0]], flat, ndim, strides)
        dv = _peak_vertices(d_ids[pk[:, 1]], flat, ndim, strides)
        for (bp, dp), x, y in zip(pk, bv, dv):
            bars.append(Bar(k, float(b_vals[bp]), float(d_vals[dp]), int(x), int(y)))
        ek = essential[k]
        ev = _peak_vertices(b_ids[ek], flat, ndim, strides)
        for p, x in zip(ek, ev):
            ess.append(Bar(k, float(b_vals[p]), float("inf"), int(x), None))
    return make_barcode(bars, ess, max_dim)
