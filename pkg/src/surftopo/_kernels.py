"""Grid and point-set kernels with a numba path and a numpy/scipy fallback.

The numba path is used when numba imports and ``SURFTOPO_DISABLE_NUMBA`` is
unset or ``0``.  Both paths return identical results; ``backend=`` forces one.
"""
from __future__ import annotations

import os

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

NUMBA_ENABLED = njit is not None and os.environ.get("SURFTOPO_DISABLE_NUMBA", "0") in ("", "0")


def _pick(backend):
    if backend is None:
        return "numba" if NUMBA_ENABLED else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and njit is None:
        raise RuntimeError("numba is not installed")
    return backend


# ---------------------------------------------------------------- clustering

def _cluster_loop(points, periods, tol):
    n = points.shape[0]
    parent = np.arange(n)
    tol2 = tol * tol
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for k in range(2):
                d = abs(points[i, k] - points[j, k])
                p = periods[k]
                if p > 0.0:
                    d = d % p
                    if p - d < d:
                        d = p - d
                d2 += d * d
            if d2 <= tol2:
                a = i
                while parent[a] != a:
                    a = parent[a]
                b = j
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        a = i
        while parent[a] != a:
            a = parent[a]
        labels[i] = a
    return labels


def _cluster_numpy(points, periods, tol, block=1024):
    n = points.shape[0]
    rows, cols = [], []
    for start in range(0, n, block):
        d = np.abs(points[start:start + block, None, :] - points[None, :, :])
        for k in range(2):
            if periods[k] > 0:
                dk = d[..., k] % periods[k]
                d[..., k] = np.minimum(dk, periods[k] - dk)
        i, j = np.nonzero((d ** 2).sum(-1) <= tol * tol)
        rows.append(i + start)
        cols.append(j)
    rows = np.concatenate(rows) if rows else np.zeros(0, int)
    cols = np.concatenate(cols) if cols else np.zeros(0, int)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    # canonical label: smallest member index
    first = np.full(comp.max() + 1 if n else 0, n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(n))
    return first[comp]


_cluster_jit = njit(cache=True)(_cluster_loop) if njit is not None else None


def cluster_points(points, periods, tol, backend=None) -> np.ndarray:
    """Single-linkage clusters of 2-D points within ``tol`` (wrap-around on
    axes with a positive period).  Label = smallest index in the cluster."""
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    periods = np.asarray(periods, dtype=np.float64)
    if points.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if _pick(backend) == "numba":
        return _cluster_jit(points, periods, float(tol))
    return _cluster_numpy(points, periods, float(tol))


# ------------------------------------------------------- level-set components

def _level_loop(grid, level, wrap_u, wrap_v):
    nu, nv = grid.shape
    nue = nu if wrap_u else nu - 1
    nve = nv if wrap_v else nv - 1
    n_uedges = nue * nv
    n_nodes = n_uedges + nu * nve
    parent = np.arange(n_nodes)
    crossing = np.zeros(n_nodes, dtype=np.bool_)
    above = grid >= level
    for i in range(nue):
        for j in range(nv):
            if above[i, j] != above[(i + 1) % nu, j]:
                crossing[i * nv + j] = True
    for i in range(nu):
        for j in range(nve):
            if above[i, j] != above[i, (j + 1) % nv]:
                crossing[n_uedges + i * nve + j] = True
    ncu = nu if wrap_u else nu - 1
    ncv = nv if wrap_v else nv - 1
    e = np.empty(4, dtype=np.int64)
    s = np.empty(4, dtype=np.bool_)
    for i in range(ncu):
        i1 = (i + 1) % nu
        for j in range(ncv):
            j1 = (j + 1) % nv
            e[0] = i * nv + j
            e[1] = n_uedges + i1 * nve + j
            e[2] = i * nv + j1
            e[3] = n_uedges + i * nve + j
            s[0] = above[i, j]
            s[1] = above[i1, j]
            s[2] = above[i1, j1]
            s[3] = above[i, j1]
            ncross = 0
            for k in range(4):
                if s[k] != s[(k + 1) % 4]:
                    ncross += 1
            if ncross == 0:
                continue
            if ncross == 2:
                a = -1
                b = -1
                for k in range(4):
                    if s[k] != s[(k + 1) % 4]:
                        if a < 0:
                            a = e[k]
                        else:
                            b = e[k]
                _union(parent, a, b)
            else:
                center = 0.25 * (grid[i, j] + grid[i1, j] + grid[i1, j1] + grid[i, j1])
                if (center >= level) == s[0]:
                    _union(parent, e[0], e[1])
                    _union(parent, e[2], e[3])
                else:
                    _union(parent, e[3], e[0])
                    _union(parent, e[1], e[2])
    count = 0
    for k in range(n_nodes):
        if crossing[k] and _find(parent, k) == k:
            count += 1
    return count


def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra != rb:
        if ra < rb:
            parent[rb] = ra
        else:
            parent[ra] = rb


if njit is not None:
    _find = njit(cache=True)(_find)
    _union = njit(cache=True)(_union)
    _level_jit = njit(cache=True)(_level_loop)
else:  # pragma: no cover
    _level_jit = None


def _level_numpy(grid, level, wrap_u, wrap_v):
    nu, nv = grid.shape
    nue = nu if wrap_u else nu - 1
    nve = nv if wrap_v else nv - 1
    n_uedges = nue * nv
    n_nodes = n_uedges + nu * nve
    above = grid >= level
    cu = np.arange(nu if wrap_u else nu - 1)
    cv = np.arange(nv if wrap_v else nv - 1)
    ucross = above[:nue, :] != above[(np.arange(nue) + 1) % nu, :]
    vcross = above[:, :nve] != above[:, (np.arange(nve) + 1) % nv]
    crossing = np.concatenate([ucross.ravel(), vcross.ravel()])

    I, J = np.meshgrid(cu, cv, indexing="ij")
    I1, J1 = (I + 1) % nu, (J + 1) % nv
    e = np.stack([I * nv + J, n_uedges + I1 * nve + J, I * nv + J1, n_uedges + I * nve + J], -1)
    s = np.stack([above[I, J], above[I1, J], above[I1, J1], above[I, J1]], -1)
    flips = s != np.roll(s, -1, axis=-1)
    ncross = flips.sum(-1)

    links = []
    two = ncross == 2
    if two.any():
        k = np.argsort(~flips[two], axis=-1, kind="stable")[:, :2]
        ee = np.take_along_axis(e[two], k, axis=-1)
        links.append(ee)
    four = ncross == 4
    if four.any():
        g = grid
        center = 0.25 * (g[I, J] + g[I1, J] + g[I1, J1] + g[I, J1])[four]
        joined = (center >= level) == s[four][:, 0]
        e4 = e[four]
        first = np.where(joined[:, None], e4[:, [0, 2]], e4[:, [3, 1]])
        second = np.where(joined[:, None], e4[:, [1, 3]], e4[:, [0, 2]])
        links.append(np.stack([first[:, 0], second[:, 0]], -1))
        links.append(np.stack([first[:, 1], second[:, 1]], -1))
    if not crossing.any():
        return 0
    pairs = np.concatenate(links) if links else np.zeros((0, 2), dtype=np.int64)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n_nodes, n_nodes))
    ncomp, _ = connected_components(graph, directed=False)
    return int(ncomp - (n_nodes - crossing.sum()))


def level_components(grid, level, wrap_u=False, wrap_v=False, backend=None) -> int:
    """Number of connected curves of ``grid == level`` by marching squares.

    ``grid[i, j]`` samples the field at the i-th u and j-th v node; wrapped
    axes add the cells between the last and the first node.  Saddle cells are
    resolved by the sign of the cell-centre average.
    """
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    if _pick(backend) == "numba":
        return int(_level_jit(grid, float(level), bool(wrap_u), bool(wrap_v)))
    return _level_numpy(grid, float(level), bool(wrap_u), bool(wrap_v))
