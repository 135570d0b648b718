"""Deterministic generators for synthetic comparison experiments.

Random draws use numpy's PCG64 generator seeded through ``SeedSequence``,
which is stable across platforms and supports independent child streams.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .core import FieldError, GraphField, ScalarField
from .divergence import SftdConfig, sftd


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def spawn(seed: int, count: int) -> list[np.random.Generator]:
    """Independent streams derived from one seed."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


# --- lattice fields ---------------------------------------------------------


def gaussian_minima_field(shape=(64, 64), centers=(), depth: float = 1.0, sigma: float = 6.0) -> ScalarField:
    """``-depth * sum_c exp(-|x - c|^2 / (2 sigma^2))`` on integer grid points."""
    if depth <= 0 or sigma <= 0:
        raise FieldError("depth and sigma must be positive")
    shape = tuple(int(d) for d in shape)
    grids = np.meshgrid(*(np.arange(d, dtype=np.float64) for d in shape), indexing="ij")
    out = np.zeros(shape)
    for c in centers:
        c = tuple(float(x) for x in c)
        if len(c) != len(shape) or any(not 0 <= x <= d - 1 for x, d in zip(c, shape)):
            raise FieldError(f"center {c} outside shape {shape}")
        sq = np.zeros(shape)
        for axis, x in zip(grids, c):
            sq = sq + (axis - x) ** 2
        out = out - depth * np.exp(-sq / (2 * sigma**2))
    return ScalarField(out)


def lattice_defect_field(cells=(3, 3), pitch: int = 6, defect_cells=()) -> ScalarField:
    """Square grid of walls at -1 over a 0 background.

    ``cells`` counts lattice cells per axis; the field has shape
    ``cells * pitch + 1``. A defect at cell ``(r, c)`` opens the wall to its
    right neighbour (or, in the last column, the wall below it; the last cell
    opens its left wall), merging two holes into one.
    """
    rows, cols = (int(x) for x in cells)
    if rows < 1 or cols < 1 or pitch < 2:
        raise FieldError("need at least one cell and pitch >= 2")
    if rows * cols < 2 and defect_cells:
        raise FieldError("a single cell has no interior wall to open")
    h, w = rows * pitch + 1, cols * pitch + 1
    f = np.zeros((h, w))
    f[::pitch, :] = -1.0
    f[:, ::pitch] = -1.0
    for r, c in defect_cells:
        if not (0 <= r < rows and 0 <= c < cols):
            raise FieldError(f"defect cell {(r, c)} outside {rows}x{cols} cells")
        top, left = r * pitch, c * pitch
        if c + 1 < cols:
            f[top + 1:top + pitch, left + pitch] = 0.0
        elif r + 1 < rows:
            f[top + pitch, left + 1:left + pitch] = 0.0
        else:
            f[top + 1:top + pitch, left] = 0.0
    return ScalarField(f)


def defect_region(cells, pitch: int, cell) -> tuple[tuple[int, int], tuple[int, int]]:
    """Inclusive bounding box of the two cells joined by a defect."""
    rows, cols = cells
    r, c = cell
    top, left = r * pitch, c * pitch
    if c + 1 < cols:
        return (top, left), (top + pitch, left + 2 * pitch)
    if r + 1 < rows:
        return (top, left), (top + 2 * pitch, left + pitch)
    return (top, left - pitch), (top + pitch, left + pitch)


def _unit_grid(grid: int) -> np.ndarray:
    return (np.arange(grid) + 0.5) / grid


def spheres_bridge_field(grid: int = 32, r_inner: float = 0.2, r_outer: float = 0.4,
                         shell_width: float = 0.05, bridge: str = "above") -> ScalarField:
    """Two concentric spherical shells at -1 joined by a tube, 0 elsewhere.

    The unit cube is sampled at ``grid`` points per axis (cell centres); axis 0
    is vertical. The tube runs along axis 0 through the centre, above or
    below the inner sphere.
    """
    if not 0 < r_inner < r_outer < 0.5:
        raise FieldError("need 0 < r_inner < r_outer < 0.5")
    if grid < 8:
        raise FieldError("grid must be at least 8")
    if bridge not in ("above", "below"):
        raise FieldError("bridge must be 'above' or 'below'")
    z, y, x = np.meshgrid(*(_unit_grid(grid),) * 3, indexing="ij")
    r = np.sqrt((z - 0.5) ** 2 + (y - 0.5) ** 2 + (x - 0.5) ** 2)
    shells = (np.abs(r - r_inner) <= shell_width) | (np.abs(r - r_outer) <= shell_width)
    f = np.where(shells | bridge_mask(grid, r_inner, r_outer, shell_width, bridge), -1.0, 0.0)
    return ScalarField(f)


def bridge_mask(grid: int, r_inner: float, r_outer: float, shell_width: float, bridge: str) -> np.ndarray:
    z, y, x = np.meshgrid(*(_unit_grid(grid),) * 3, indexing="ij")
    radial = np.sqrt((y - 0.5) ** 2 + (x - 0.5) ** 2)
    height = z - 0.5 if bridge == "above" else 0.5 - z
    return (radial <= shell_width) & (height >= r_inner) & (height <= r_outer)


def bridge_box(grid: int, r_inner: float, r_outer: float, shell_width: float, bridge: str):
    """Inclusive index bounding box of the tube."""
    idx = np.argwhere(bridge_mask(grid, r_inner, r_outer, shell_width, bridge))
    return tuple(idx.min(axis=0)), tuple(idx.max(axis=0))


# --- graphs -----------------------------------------------------------------


def watts_strogatz(n: int = 30, k_ring: int = 4, beta: float = 0.3, seed: int = 0) -> np.ndarray:
    """Edge list of a Watts-Strogatz small-world graph.

    Starts from a ring where every vertex links to its ``k_ring / 2`` nearest
    neighbours on each side; each lattice edge ``(u, u + j)`` is then, with
    probability ``beta``, rewired to ``(u, w)`` for a uniform ``w`` that
    creates neither a self-loop nor a duplicate.
    """
    if k_ring % 2 or k_ring < 2 or k_ring >= n:
        raise FieldError(f"k_ring must be even and in [2, n), got {k_ring}")
    if not 0 <= beta <= 1:
        raise FieldError(f"beta must lie in [0, 1], got {beta}")
    rng = make_rng(seed)
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k_ring // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k_ring // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if rng.random() >= beta or v not in adj[u] or len(adj[u]) >= n - 1:
                continue
            choices = [w for w in range(n) if w != u and w not in adj[u]]
            w = choices[int(rng.integers(len(choices)))]
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    edges = sorted((u, v) for u in range(n) for v in adj[u] if u < v)
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def normalized_laplacian(n: int, edges) -> np.ndarray:
    a = np.zeros((n, n))
    edges = np.asarray(edges).reshape(-1, 2)
    a[edges[:, 0], edges[:, 1]] = a[edges[:, 1], edges[:, 0]] = 1.0
    deg = a.sum(axis=1)
    if (deg == 0).any():
        raise FieldError(f"isolated vertex {int(np.flatnonzero(deg == 0)[0])}")
    s = 1 / np.sqrt(deg)
    return np.eye(n) - s[:, None] * a * s[None, :]


@njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if np.sqrt(off) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.diag(a).copy(), v


def laplacian_eigenvectors(n: int, edges, tol: float = 1e-10) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of the normalized Laplacian by cyclic Jacobi rotations.

    Sorted by eigenvalue; each vector has unit norm and its largest-magnitude
    entry (first one on ties) positive.
    """
    lap = normalized_laplacian(n, edges)
    vals, vecs = _jacobi(lap.copy(), tol, 100)
    order = np.argsort(vals, kind="stable")
    out = []
    for i in order:
        vec = vecs[:, i] / np.linalg.norm(vecs[:, i])
        if vec[np.argmax(np.abs(vec))] < 0:
            vec = -vec
        out.append((float(vals[i]), vec))
    return out


def eigenvector_heatmap(n: int, edges, degrees=(0, 1), p: float = 1.0) -> np.ndarray:
    """Symmetrized SFTD summed over ``degrees`` for every eigenvector pair."""
    pairs = laplacian_eigenvectors(n, edges)
    graphs = [GraphField(n, edges, vec) for _, vec in pairs]
    cfg = SftdConfig(tuple(degrees), p, symmetric=True)
    heat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            heat[i, j] = heat[j, i] = sftd(graphs[i], graphs[j], cfg).total
    return heat
