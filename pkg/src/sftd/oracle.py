"""Brute-force persistence reference.

Materializes every cell of a small filtered complex, sorts them into one
global order and runs the textbook left-to-right Z/2 reduction. Kept
deliberately naive and free of the optimized engines' code so it can serve
as an independent check on them.
"""

from __future__ import annotations

import builtins
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Bar, Barcode, FiltrationMatrix, ScalarField, make_barcode

MAX_CELLS = 20_000


@dataclass(frozen=True)
class Cell:
    dim: int
    key: tuple  # sorted vertex tuple, or (anchor index, mask) for cubes
    value: float
    vertices: tuple[int, ...]  # vertex ids (matrix indices or linear lattice indices)
    peak: int


@dataclass(frozen=True)
class ExplicitComplex:
    cells: tuple[Cell, ...]
    boundary: tuple[tuple[int, ...], ...]  # facet positions in ``cells``
    max_dim: int
    kind: str  # "flag" or "cubical"


def enumerate(source, max_dim: int) -> ExplicitComplex:  # noqa: A001
    """Every cell of the flag or cubical complex, in filtration order."""
    if isinstance(source, FiltrationMatrix):
        return _enumerate_flag(source.entries, max_dim)
    if isinstance(source, ScalarField):
        return _enumerate_cubical(source.values, max_dim)
    raise TypeError(f"cannot enumerate {type(source).__name__}")


def _enumerate_flag(m: np.ndarray, max_dim: int) -> ExplicitComplex:
    n = m.shape[0]
    raw = []
    for size in range(1, max_dim + 3):
        for combo in itertools.combinations(range(n), size):
            edges = list(itertools.combinations(combo, 2))
            if any(math.isinf(m[a][b]) for a, b in edges):
                continue
            value = max([m[v][v] for v in combo] + [m[a][b] for a, b in edges])
            # peak: max-valued vertex first, else first max-valued edge
            peak = None
            for v in combo:
                if m[v][v] == value:
                    peak = v
                    break
            if peak is None:
                peak = next(a for a, b in edges if m[a][b] == value)
            raw.append(Cell(size - 1, combo, float(value), combo, peak))
            if len(raw) > MAX_CELLS:
                raise ValueError("complex too large for the oracle")
    raw.sort(key=lambda c: (c.value, c.dim, c.key))
    where = {c.key: i for i, c in builtins.enumerate(raw)}
    boundary = []
    for c in raw:
        if c.dim == 0:
            boundary.append(())
        else:
            facets = [c.key[:i] + c.key[i + 1:] for i in range(len(c.key))]
            boundary.append(tuple(sorted(where[f] for f in facets)))
    return ExplicitComplex(tuple(raw), tuple(boundary), max_dim, "flag")


def _enumerate_cubical(values: np.ndarray, max_dim: int) -> ExplicitComplex:
    shape = values.shape
    ndim = len(shape)
    top = min(max_dim + 1, ndim)

    def linear(coord):
        idx = 0
        for c, d in zip(coord, shape):
            idx = idx * d + c
        return idx

    raw = []
    for coord in itertools.product(*(range(d) for d in shape)):
        for mask in range(1 << ndim):
            axes = [a for a in range(ndim) if mask >> a & 1]
            if len(axes) > top:
                continue
            if any(coord[a] + 1 >= shape[a] for a in axes):
                continue
            verts = []
            for offs in itertools.product((0, 1), repeat=len(axes)):
                v = list(coord)
                for a, o in zip(axes, offs):
                    v[a] += o
                verts.append(linear(v))
            vals = [values[np.unravel_index(v, shape)] for v in verts]
            value = max(vals)
            peak = min(v for v, x in zip(verts, vals) if x == value)
            raw.append(Cell(len(axes), (linear(coord), mask), float(value), tuple(sorted(verts)), peak))
            if len(raw) > MAX_CELLS:
                raise ValueError("complex too large for the oracle")
    raw.sort(key=lambda c: (c.value, c.dim, c.key))
    where = {c.key: i for i, c in builtins.enumerate(raw)}
    strides = [math.prod(shape[a + 1:]) for a in range(ndim)]
    boundary = []
    for c in raw:
        anchor, mask = c.key
        facets = []
        for a in range(ndim):
            if mask >> a & 1:
                facets.append(where[(anchor, mask ^ (1 << a))])
                facets.append(where[(anchor + strides[a], mask ^ (1 << a))])
        boundary.append(tuple(sorted(facets)))
    return ExplicitComplex(tuple(raw), tuple(boundary), max_dim, "cubical")


def reduce(cx: ExplicitComplex) -> Barcode:
    """Left-to-right column reduction, no clearing, no shortcuts."""
    low_owner = {}
    columns = []
    for j, facets in builtins.enumerate(cx.boundary):
        col = set(facets)
        while col and max(col) in low_owner:
            col ^= columns[low_owner[max(col)]]
        columns.append(col)
        if col:
            low_owner[max(col)] = j
    paired = set(low_owner) | {j for j, col in builtins.enumerate(columns) if col}

    bars, essential = [], []
    flag = cx.kind == "flag"
    for low, j in low_owner.items():
        b, d = cx.cells[low], cx.cells[j]
        if b.dim > cx.max_dim:
            continue
        bars.append(
            Bar(
                b.dim, b.value, d.value, b.peak, d.peak,
                b.vertices if flag else None, d.vertices if flag else None,
            )
        )
    for i, c in builtins.enumerate(cx.cells):
        if i in paired or c.dim > cx.max_dim:
            continue
        essential.append(Bar(c.dim, c.value, math.inf, c.peak, None, c.vertices if flag else None, None))
    return make_barcode(bars, essential, cx.max_dim)


def betti_at(cx: ExplicitComplex, alpha: float, k: int) -> int:
    """Rank of degree-k homology of the cells with value <= alpha."""
    sub = [i for i, c in builtins.enumerate(cx.cells) if c.value <= alpha]
    k_cells = [i for i in sub if cx.cells[i].dim == k]
    return len(k_cells) - _rank(cx, sub, k) - _rank(cx, sub, k + 1)


def _rank(cx: ExplicitComplex, sub, k: int) -> int:
    """Z/2 rank of the boundary map from k-cells to (k-1)-cells of ``sub``."""
    if k <= 0:
        return 0
    rows = []
    for i in sub:
        if cx.cells[i].dim == k:
            bits = 0
            for f in cx.boundary[i]:
                bits |= 1 << f
            rows.append(bits)
    rank = 0
    pivots = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def cell_count_at(cx: ExplicitComplex, alpha: float, k: int) -> int:
    return sum(1 for c in cx.cells if c.dim == k and c.value <= alpha)
