"""Block-wise dense linear algebra on sparse matrices.

A sparse matrix splits into independent blocks along the connected
components of its sparsity graph; eigen- and singular-value problems are
solved densely per block. This is exact block diagonalisation, not an
approximation, and keeps the parent-Hamiltonian checks cheap for operators
whose nominal dimension is in the thousands.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


def as_sparse(m) -> sparse.csr_array:
    if sparse.issparse(m):
        return sparse.csr_array(m)
    return sparse.csr_array(np.asarray(m, dtype=float))


def _components(graph: sparse.csr_array) -> list[np.ndarray]:
    n, labels = csgraph.connected_components(graph, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n + 1))
    return [order[bounds[i]:bounds[i + 1]] for i in range(n)]


def hermitian_blocks(h) -> list[np.ndarray]:
    """Index sets of the diagonal blocks of a (structurally symmetric) matrix."""
    h = as_sparse(h)
    pattern = (abs(h) + abs(h.T)).astype(bool).astype(np.int8)
    pattern.setdiag(1)
    return _components(sparse.csr_array(pattern))


def eigvalsh_blockwise(h) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, block by block (ascending)."""
    h = as_sparse(h)
    out = []
    singles = []
    for idx in hermitian_blocks(h):
        if len(idx) == 1:
            singles.append(idx[0])
            continue
        block = h[idx][:, idx].toarray()
        out.append(np.linalg.eigvalsh((block + block.conj().T) / 2))
    if singles:
        out.append(np.real(h.diagonal()[np.array(singles)]))
    return np.sort(np.concatenate(out)) if out else np.zeros(0)


def min_eigenvalue(h) -> float:
    ev = eigvalsh_blockwise(h)
    return float(ev[0]) if len(ev) else 0.0


def kernel_dimension(h, tol: float) -> int:
    """Number of eigenvalues with magnitude at most ``tol * max(1, ||h||)``."""
    ev = eigvalsh_blockwise(h)
    if not len(ev):
        return 0
    scale = max(1.0, float(np.max(np.abs(ev))))
    return int(np.sum(np.abs(ev) <= tol * scale))


def kernel_basis(h, tol: float) -> sparse.csc_array:
    """Orthonormal kernel basis (columns) of a Hermitian matrix, block by block."""
    h = as_sparse(h)
    n = h.shape[0]
    ev_all = eigvalsh_blockwise(h)
    cutoff = tol * (max(1.0, float(np.max(np.abs(ev_all)))) if len(ev_all) else 1.0)
    diag = np.real(h.diagonal())
    rows, cols, vals = [], [], []
    for idx in hermitian_blocks(h):
        if len(idx) == 1:
            if abs(diag[idx[0]]) <= cutoff:
                rows.append(idx[0])
                cols.append((idx[0], 0))
                vals.append(1.0)
            continue
        block = h[idx][:, idx].toarray()
        w, v = np.linalg.eigh((block + block.conj().T) / 2)
        for j in np.flatnonzero(np.abs(w) <= cutoff):
            vec = v[:, j]
            nz = np.flatnonzero(vec)
            rows.extend(idx[nz])
            # column key (block leader, eigen-index), numbered in sorted order below
            cols.extend([(idx[0], j)] * len(nz))
            vals.extend(vec[nz])
    keys = sorted(set(cols))
    pos = {k: i for i, k in enumerate(keys)}
    col_idx = [pos[c] for c in cols]
    return sparse.csc_array((vals, (rows, col_idx)), shape=(n, len(keys)))


def column_space_basis(m, tol: float) -> sparse.csc_array:
    """Orthonormal basis of the column space via block-wise SVD.

    Singular values at most ``tol`` times the largest one count as zero.
    Blocks are the connected components of the bipartite row/column graph.
    """
    m = sparse.csr_array(as_sparse(m))
    n_rows, n_cols = m.shape
    m.eliminate_zeros()
    coo = m.tocoo()
    live_rows = np.unique(coo.row)
    live_cols = np.unique(coo.col)
    if not len(live_rows):
        return sparse.csc_array((n_rows, 0))
    r_pos = {r: i for i, r in enumerate(live_rows)}
    c_pos = {c: i for i, c in enumerate(live_cols)}
    nr = len(live_rows)
    ri = np.array([r_pos[r] for r in coo.row])
    ci = np.array([c_pos[c] for c in coo.col]) + nr
    size = nr + len(live_cols)
    graph = sparse.csr_array((np.ones(len(ri)), (ri, ci)), shape=(size, size))
    blocks = []
    for comp in _components(graph):
        br = live_rows[np.sort(comp[comp < nr])]
        bc = live_cols[np.sort(comp[comp >= nr] - nr)]
        u, s, _ = np.linalg.svd(m[br][:, bc].toarray(), full_matrices=False)
        blocks.append((br, u, s))
    smax = max(float(s[0]) for _, _, s in blocks if len(s))
    rows, cols, vals = [], [], []
    k = 0
    for br, u, s in sorted(blocks, key=lambda b: b[0][0]):
        for j in np.flatnonzero(s > tol * smax):
            vec = u[:, j]
            nz = np.flatnonzero(vec)
            rows.extend(br[nz])
            cols.extend([k] * len(nz))
            vals.extend(vec[nz])
            k += 1
    return sparse.csc_array((vals, (rows, cols)), shape=(n_rows, k))


def subspaces_equal(a, b, tol: float) -> bool:
    """Mutual containment of the column spans of two orthonormal bases."""
    a, b = as_sparse(a), as_sparse(b)
    if a.shape[1] != b.shape[1]:
        return False
    return contained_in(a, b, tol) and contained_in(b, a, tol)


def contained_in(a, b, tol: float) -> bool:
    """Whether span(a) lies in span(b), for orthonormal column bases."""
    a, b = as_sparse(a), as_sparse(b)
    if a.shape[1] == 0:
        return True
    residual = (a - b @ (b.T @ a)).tocoo()
    return not residual.nnz or float(np.max(np.abs(residual.data))) <= tol
