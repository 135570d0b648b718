"""F-Cross-Barcodes of two functions on a common graph or lattice.

For graphs, the comparison lives on a doubled graph with vertices
``A'_0..A'_{n-1}`` (indices ``0..n-1``, value ``min(f, g)``), ``A_0..A_{n-1}``
(indices ``n..2n-1``, value ``f``) and a cone point ``O`` (index ``2n``,
value ``min(f, g)`` over everything). For lattices, an extra leading axis of
length 3 stacks the constant minimum, ``f`` and ``min(f, g)``.

Every finite value of either construction is copied from ``f`` or ``g`` at
some vertex; the provenance arrays below record which, so that gradients
can be routed back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Bar, Barcode, FieldError, FiltrationMatrix, GraphField, ScalarField, global_min
from .cubical import cubical_persistence
from .flag import flag_persistence

FROM_NONE, FROM_F, FROM_G = -1, 0, 1
BIRTH_COLOR, DEATH_COLOR = "orange", "red"


@dataclass(frozen=True)
class DoubledMatrix:
    matrix: FiltrationMatrix
    n: int
    source: np.ndarray  # FROM_* per entry
    source_vertex: np.ndarray  # original vertex supplying each entry

    def original_vertex(self, index: int) -> int | None:
        """A'_i and A_i both map to i; the cone point maps to None."""
        if index == 2 * self.n:
            return None
        return index % self.n


@dataclass(frozen=True)
class ExtendedField:
    field: ScalarField
    source: np.ndarray  # FROM_* per extended vertex, same shape as field

    @property
    def base_shape(self) -> tuple[int, ...]:
        return self.field.shape[1:]


@dataclass(frozen=True)
class LocalizedBar:
    bar: Bar
    birth_site: tuple[int, ...] | None
    death_site: tuple[int, ...] | None
    birth_color: str = BIRTH_COLOR
    death_color: str = DEATH_COLOR


def _edge_matrix(values: np.ndarray, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower-star matrix of one function plus the vertex supplying each entry."""
    n = values.size
    m = np.full((n, n), np.inf)
    who = np.full((n, n), -1, np.int64)
    m[np.arange(n), np.arange(n)] = values
    who[np.arange(n), np.arange(n)] = np.arange(n)
    if edges.size:
        i, j = edges[:, 0], edges[:, 1]
        top = np.where(values[j] > values[i], j, i)  # ties -> smaller index i
        m[i, j] = m[j, i] = values[top]
        who[i, j] = who[j, i] = top
    return m, who


def build_doubled_matrix(f: GraphField, g: GraphField) -> DoubledMatrix:
    """The (2n+1)x(2n+1) block filtration matrix comparing f against min(f, g)."""
    if not f.same_graph(g):
        raise FieldError("f and g must be defined on the same graph")
    n = f.vertex_count
    F, who_f = _edge_matrix(f.values, f.edges)
    G, who_g = _edge_matrix(g.values, g.edges)
    inf_col = np.full((n, 1), np.inf)
    lowest = global_min(f.values, g.values)

    f_plus = F.copy()
    f_plus[np.tril_indices(n, -1)] = np.inf
    f_diag = np.diag(F).reshape(1, n)
    m = np.block([
        [np.minimum(F, G), f_plus.T, inf_col],
        [f_plus, F, f_diag.T],
        [inf_col.T, f_diag, np.array([[lowest]])],
    ])

    size = 2 * n + 1
    source = np.full((size, size), FROM_NONE, np.int8)
    vertex = np.full((size, size), -1, np.int64)
    # A' block: whichever of F, G is smaller (ties -> f)
    use_f = F <= G
    finite = np.isfinite(np.minimum(F, G))
    source[:n, :n] = np.where(finite, np.where(use_f, FROM_F, FROM_G), FROM_NONE)
    vertex[:n, :n] = np.where(use_f, who_f, who_g)
    # every block built from F
    for rows, cols in [(slice(n, 2 * n), slice(0, n)), (slice(0, n), slice(n, 2 * n)),
                       (slice(n, 2 * n), slice(n, 2 * n))]:
        block = m[rows, cols]
        source[rows, cols] = np.where(np.isfinite(block), FROM_F, FROM_NONE)
        vertex[rows, cols] = np.where(np.isfinite(block), who_f, -1)
    source[2 * n, n:2 * n] = source[n:2 * n, 2 * n] = FROM_F
    vertex[2 * n, n:2 * n] = vertex[n:2 * n, 2 * n] = np.arange(n)
    # the cone point carries the global minimum, attributed to its argmin (f first)
    if f.values.min() <= g.values.min():
        source[2 * n, 2 * n], vertex[2 * n, 2 * n] = FROM_F, int(np.argmin(f.values))
    else:
        source[2 * n, 2 * n], vertex[2 * n, 2 * n] = FROM_G, int(np.argmin(g.values))
    return DoubledMatrix(FiltrationMatrix(m), n, source, vertex)


def build_extended_field(f: ScalarField, g: ScalarField) -> ExtendedField:
    """Stack (global min, f, min(f, g)) along a new leading axis."""
    if f.shape != g.shape:
        raise FieldError(f"shape mismatch: {list(f.shape)} vs {list(g.shape)}")
    lowest = global_min(f.values, g.values)
    fv, gv = f.values, g.values
    ext = np.stack([np.full(f.shape, lowest), fv, np.minimum(fv, gv)])
    source = np.stack([
        np.full(f.shape, FROM_NONE, np.int8),
        np.full(f.shape, FROM_F, np.int8),
        np.where(fv <= gv, FROM_F, FROM_G).astype(np.int8),
    ])
    return ExtendedField(ScalarField(ext), source)


def max_degree(f) -> int:
    """Largest degree an F-Cross-Barcode can be asked for."""
    if isinstance(f, ScalarField):
        return f.ndim
    return 2 * f.vertex_count - 1


def cross_barcode(f, g, max_dim: int) -> tuple[Barcode, DoubledMatrix | ExtendedField]:
    """F-Cross-Barcode in degrees 0..max_dim, plus the construction behind it."""
    if isinstance(f, ScalarField) and isinstance(g, ScalarField):
        if not 0 <= max_dim <= f.ndim:
            raise FieldError(
                f"degree {max_dim} exceeds lattice dimension {f.ndim} "
                f"(the extended lattice has {f.ndim + 1} axes and no degree-{f.ndim + 1} homology)"
            )
        ext = build_extended_field(f, g)
        return cubical_persistence(ext.field, max_dim), ext
    if isinstance(f, GraphField) and isinstance(g, GraphField):
        if not 0 <= max_dim <= max_degree(f):
            raise FieldError(f"degree {max_dim} out of range for a {f.vertex_count}-vertex graph")
        dm = build_doubled_matrix(f, g)
        return flag_persistence(dm.matrix, max_dim), dm
    raise FieldError("f and g must both be ScalarFields or both GraphFields")


def f_cross_barcode(f, g, k: int) -> Barcode:
    """F-Cross-Barcode of degrees 0..k; essential bars are kept apart."""
    return cross_barcode(f, g, k)[0]


def bar_sources(bar: Bar, construction) -> tuple[tuple[int, int], tuple[int, int]]:
    """``((kind, vertex), (kind, vertex))`` supplying the birth and death values."""
    return _source(bar.birth_vertex, bar.birth_cell, construction), _source(
        bar.death_vertex, bar.death_cell, construction
    )


def _source(peak, cell, construction) -> tuple[int, int]:
    if isinstance(construction, ExtendedField):
        size = int(np.prod(construction.base_shape))
        layer, j = divmod(int(peak), size)
        return int(construction.source.reshape(3, -1)[layer, j]), j
    m = construction.matrix.entries
    value = max(m[v, v] for v in cell)
    value = max([value] + [m[a, b] for i, a in enumerate(cell) for b in cell[i + 1:]])
    for v in cell:
        if m[v, v] == value:
            return int(construction.source[v, v]), int(construction.source_vertex[v, v])
    for i, a in enumerate(cell):
        for b in cell[i + 1:]:
            if m[a, b] == value:
                return int(construction.source[a, b]), int(construction.source_vertex[a, b])
    raise AssertionError("simplex value not attained")


def site(vertex: int | None, construction) -> tuple[int, ...] | None:
    """Coordinates in the original domain of a construction vertex (None for O)."""
    if vertex is None:
        return None
    if isinstance(construction, ExtendedField):
        coords = np.unravel_index(int(vertex), construction.field.shape)[1:]
        return tuple(int(c) for c in coords)
    v = construction.original_vertex(int(vertex))
    return None if v is None else (v,)


def localize(barcode: Barcode, construction) -> list[LocalizedBar]:
    """Map each finite bar's birth/death vertices onto the original domain."""
    return [
        LocalizedBar(bar, site(bar.birth_vertex, construction), site(bar.death_vertex, construction))
        for bar in barcode.bars
    ]


def sublevel_barcode(f, max_dim: int) -> Barcode:
    """Ordinary lower-star barcode of one field or graph function."""
    if isinstance(f, ScalarField):
        return cubical_persistence(f, max_dim)
    m, _ = _edge_matrix(f.values, f.edges)
    return flag_persistence(FiltrationMatrix(m), max_dim)


def sublevel_site(vertex: int | None, f) -> tuple[int, ...] | None:
    if vertex is None:
        return None
    if isinstance(f, ScalarField):
        return tuple(int(c) for c in np.unravel_index(int(vertex), f.shape))
    return (int(vertex),)
