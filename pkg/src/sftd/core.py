"""Domain types, validation and file ingestion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class FieldError(ValueError):
    """Raised for malformed fields, graphs or input files."""


def _first_nonfinite(values: np.ndarray) -> int | None:
    bad = np.flatnonzero(~np.isfinite(values.ravel()))
    return int(bad[0]) if bad.size else None


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Values of a function on the nodes of an n-dimensional lattice."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if arr.ndim < 1:
            raise FieldError("a field needs at least one axis")
        if any(d < 1 for d in arr.shape):
            raise FieldError(f"every axis must have length >= 1, got shape {arr.shape}")
        k = _first_nonfinite(arr)
        if k is not None:
            raise FieldError(f"non-finite value at linear index {k}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_flat(cls, shape, flat) -> "ScalarField":
        flat = np.asarray(flat, dtype=np.float64)
        shape = tuple(int(d) for d in shape)
        if flat.size != math.prod(shape):
            raise FieldError(f"{flat.size} values do not fill shape {shape}")
        return cls(flat.reshape(shape))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __eq__(self, other):
        return (
            isinstance(other, ScalarField)
            and self.shape == other.shape
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GraphField:
    """An undirected simple graph with a real value on every vertex.

    ``edges`` is normalized to a sorted ``(m, 2)`` integer array with
    ``i < j`` in every row and no duplicates.
    """

    vertex_count: int
    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        n = int(self.vertex_count)
        if n < 1:
            raise FieldError("a graph needs at least one vertex")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            loops = np.flatnonzero(edges[:, 0] == edges[:, 1])
            if loops.size:
                v = int(edges[loops[0], 0])
                raise FieldError(f"self-loop at vertex {v}")
            bad = np.flatnonzero((edges < 0).any(axis=1) | (edges >= n).any(axis=1))
            if bad.size:
                i, j = edges[bad[0]]
                raise FieldError(f"edge ({i}, {j}) has an endpoint outside [0, {n})")
            edges = np.unique(np.sort(edges, axis=1), axis=0)
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size != n:
            raise FieldError(f"{values.size} values for {n} vertices")
        k = _first_nonfinite(values)
        if k is not None:
            raise FieldError(f"non-finite value at vertex {k}")
        edges.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    def with_values(self, values) -> "GraphField":
        return GraphField(self.vertex_count, self.edges, values)

    def same_graph(self, other: "GraphField") -> bool:
        return self.vertex_count == other.vertex_count and np.array_equal(
            self.edges, other.edges
        )

    def __eq__(self, other):
        return (
            isinstance(other, GraphField)
            and self.same_graph(other)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FiltrationMatrix:
    """Symmetric matrix of vertex (diagonal) and edge (off-diagonal) values.

    ``+inf`` off the diagonal means the edge is absent.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise FieldError(f"filtration matrix must be square and nonempty, got {m.shape}")
        diag = np.diag(m)
        if not np.isfinite(diag).all():
            raise FieldError("diagonal entries must be finite")
        if np.isnan(m).any() or np.isneginf(m).any():
            raise FieldError("entries must be real or +inf")
        if not np.array_equal(m, m.T):
            raise FieldError("filtration matrix is not symmetric")
        finite = np.isfinite(m)
        floor = np.maximum.outer(diag, diag)
        if (m[finite] < floor[finite]).any():
            i, j = np.argwhere(finite & (m < floor))[0]
            raise FieldError(f"edge ({i}, {j}) enters before one of its endpoints")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Bar:
    dim: int
    birth: float
    death: float
    birth_vertex: int | None = None
    death_vertex: int | None = None
    # vertex tuples of the birth/death simplices (flag complexes only)
    birth_cell: tuple[int, ...] | None = None
    death_cell: tuple[int, ...] | None = None

    @property
    def length(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class Barcode:
    """Finite bars and essential (never dying) bars, each sorted."""

    bars: tuple[Bar, ...] = ()
    essential: tuple[Bar, ...] = ()
    max_dim: int = 0

    def finite(self, dim: int) -> list[Bar]:
        return [b for b in self.bars if b.dim == dim]

    def intervals(self, dim: int) -> np.ndarray:
        """``(m, 2)`` array of finite (birth, death) pairs in degree ``dim``."""
        pts = [(b.birth, b.death) for b in self.bars if b.dim == dim]
        return np.array(pts, dtype=np.float64).reshape(-1, 2)

    def essential_births(self, dim: int) -> np.ndarray:
        return np.array([b.birth for b in self.essential if b.dim == dim], dtype=np.float64)

    def dims(self) -> range:
        return range(self.max_dim + 1)


def make_barcode(bars, essential, max_dim) -> Barcode:
    """Drop zero-length bars and sort into a canonical order."""
    def key(b):
        bv = -1 if b.birth_vertex is None else b.birth_vertex
        dv = -1 if b.death_vertex is None else b.death_vertex
        return (b.dim, b.birth, b.death, bv, dv, b.birth_cell or (), b.death_cell or ())

    finite = sorted((b for b in bars if b.death > b.birth), key=key)
    ess = sorted(essential, key=key)
    return Barcode(tuple(finite), tuple(ess), max_dim)


@dataclass
class SparseGradient:
    """Per-vertex partial derivatives of a divergence w.r.t. f and g."""

    wrt_f: dict[int, float] = field(default_factory=dict)
    wrt_g: dict[int, float] = field(default_factory=dict)

    def add(self, source: str, index: int, value: float):
        target = self.wrt_f if source == "f" else self.wrt_g
        target[index] = target.get(index, 0.0) + value

    def scaled(self, factor: float) -> "SparseGradient":
        return SparseGradient(
            {k: v * factor for k, v in self.wrt_f.items()},
            {k: v * factor for k, v in self.wrt_g.items()},
        )

    def merged(self, other: "SparseGradient") -> "SparseGradient":
        out = SparseGradient(dict(self.wrt_f), dict(self.wrt_g))
        for k, v in other.wrt_f.items():
            out.add("f", k, v)
        for k, v in other.wrt_g.items():
            out.add("g", k, v)
        return out

    def dense(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        df = np.zeros(size)
        dg = np.zeros(size)
        for k, v in self.wrt_f.items():
            df[k] = v
        for k, v in self.wrt_g.items():
            dg[k] = v
        return df, dg


def global_min(f, g) -> float:
    f = np.asarray(f, dtype=np.float64).ravel()
    g = np.asarray(g, dtype=np.float64).ravel()
    if f.size != g.size:
        raise FieldError(f"length mismatch: {f.size} vs {g.size}")
    if f.size == 0:
        raise FieldError("empty input")
    return float(min(f.min(), g.min()))


# --- file formats -----------------------------------------------------------


def load_field(path, format: str | None = None) -> ScalarField:
    """Read a field from an ``.npy`` file or the semicolon csv layout."""
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "npy":
        return _load_npy(path)
    if fmt == "csv":
        return _load_field_csv(path)
    raise FieldError(f"unknown field format {fmt!r}")


def _load_npy(path: Path) -> ScalarField:
    with open(path, "rb") as fh:
        try:
            version = np.lib.format.read_magic(fh)
        except ValueError as exc:
            raise FieldError(f"{path}: malformed npy header ({exc})") from None
        if version != (1, 0):
            raise FieldError(f"{path}: npy version {version} unsupported, need 1.0")
        try:
            shape, fortran, dtype = np.lib.format.read_array_header_1_0(fh)
        except ValueError as exc:
            raise FieldError(f"{path}: malformed npy header ({exc})") from None
        if fortran:
            raise FieldError(f"{path}: Fortran-ordered arrays are not accepted")
        if dtype != np.dtype("<f8"):
            raise FieldError(f"{path}: dtype {dtype.str} unsupported, need <f8")
        count = math.prod(shape)
        data = np.fromfile(fh, dtype="<f8", count=count)
        if data.size != count:
            raise FieldError(f"{path}: truncated data, {data.size} of {count} values")
    k = _first_nonfinite(data)
    if k is not None:
        raise FieldError(f"non-finite value at linear index {k}")
    return ScalarField(data.reshape(shape))


def _load_field_csv(path: Path) -> ScalarField:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise FieldError(f"{path}: empty file")
    head = [t.strip() for t in lines[0].split(",")]
    if head[0] != "shape" or len(head) < 2:
        raise FieldError(f"{path}: header must read 'shape,d1,...', got {lines[0]!r}")
    try:
        shape = tuple(int(t) for t in head[1:])
    except ValueError:
        raise FieldError(f"{path}: non-integer extent in header {lines[0]!r}") from None
    if any(d < 1 for d in shape):
        raise FieldError(f"{path}: extents must be positive, got {shape}")
    flat = []
    for ln in lines[1:]:
        for tok in ln.split(";"):
            tok = tok.strip()
            try:
                flat.append(float(tok))
            except ValueError:
                raise FieldError(f"{path}: bad number {tok!r} at linear index {len(flat)}") from None
    flat = np.array(flat, dtype=np.float64)
    k = _first_nonfinite(flat)
    if k is not None:
        raise FieldError(f"non-finite value at linear index {k}")
    return ScalarField.from_flat(shape, flat)


def save_field(field: ScalarField, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "npy":
        with open(path, "wb") as fh:
            np.lib.format.write_array(
                fh, np.ascontiguousarray(field.values, dtype="<f8"), version=(1, 0)
            )
    elif fmt == "csv":
        arr = field.values.reshape(-1, field.shape[-1])
        rows = [",".join(["shape", *map(str, field.shape)])]
        rows += [";".join(repr(float(x)) for x in row) for row in arr]
        path.write_text("\n".join(rows) + "\n")
    else:
        raise FieldError(f"unknown field format {fmt!r}")


def load_graph_field(edges_path, values_path) -> GraphField:
    values = []
    for lineno, ln in enumerate(Path(values_path).read_text().splitlines(), 1):
        if not ln.strip():
            continue
        try:
            values.append(float(ln))
        except ValueError:
            raise FieldError(f"{values_path}:{lineno}: bad value {ln!r}") from None
    return GraphField(len(values), load_edges(edges_path), values)


def load_edges(path) -> np.ndarray:
    edges = []
    for lineno, ln in enumerate(Path(path).read_text().splitlines(), 1):
        if not ln.strip():
            continue
        parts = ln.split(",")
        try:
            i, j = (int(p) for p in parts)
        except ValueError:
            raise FieldError(f"{path}:{lineno}: expected 'i,j', got {ln!r}") from None
        if i == j:
            raise FieldError(f"{path}:{lineno}: self-loop at vertex {i}")
        edges.append((i, j))
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def save_edges(edges, path) -> None:
    lines = [f"{int(i)},{int(j)}" for i, j in np.asarray(edges).reshape(-1, 2)]
    Path(path).write_text("".join(ln + "\n" for ln in lines))


def save_values(values, path) -> None:
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in np.ravel(values)))
