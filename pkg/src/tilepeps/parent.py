"""Parent Hamiltonians of PEPS: the boundary-to-physical map, projector terms,
domination, and the composed-tensor construction.

Physical multi-indices of a region list its plaquettes in (row, column)
order, first plaquette most significant. Boundary configurations list the
open virtual legs plaquette by plaquette, legs in (up, down, left, right)
order, first leg most significant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import sparse

from . import _linalg
from .config import DEFAULT, PipelineConfig
from .errors import BudgetExceeded, InvalidInput
from .hamiltonian import HORIZONTAL, VERTICAL, bulk_term_matrix
from .tensor import VIRTUAL, Tensor, direct_sum, tensor_product
from .tiling import TileSet

_STEP = {"up": (1, 0), "down": (-1, 0), "left": (0, -1), "right": (0, 1)}
_OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}


@dataclass(frozen=True)
class Region:
    cells: frozenset

    def __post_init__(self):
        cells = frozenset((int(r), int(c)) for r, c in self.cells)
        if not cells:
            raise InvalidInput("region must contain at least one plaquette")
        object.__setattr__(self, "cells", cells)
        start = min(cells)
        seen, todo = {start}, [start]
        while todo:
            r, c = todo.pop()
            for dr, dc in _STEP.values():
                nb = (r + dr, c + dc)
                if nb in cells and nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        if seen != cells:
            raise InvalidInput(f"region {sorted(cells)} is not connected")

    @classmethod
    def of(cls, *cells) -> Region:
        return cls(frozenset(cells))

    @classmethod
    def pair(cls, orientation: str = HORIZONTAL) -> Region:
        if orientation == HORIZONTAL:
            return cls.of((0, 0), (0, 1))
        if orientation == VERTICAL:
            return cls.of((0, 0), (1, 0))
        raise InvalidInput(f"unknown orientation {orientation!r}")

    @property
    def ordered(self) -> tuple:
        return tuple(sorted(self.cells))

    def neighbour(self, cell, leg):
        dr, dc = _STEP[leg]
        nb = (cell[0] + dr, cell[1] + dc)
        return nb if nb in self.cells else None

    def boundary_legs(self) -> list[tuple[tuple[int, int], str]]:
        return [(cell, leg) for cell in self.ordered for leg in VIRTUAL
                if self.neighbour(cell, leg) is None]

    def boundary_dim(self, A: Tensor) -> int:
        return int(np.prod([A.dim(leg) for _, leg in self.boundary_legs()], dtype=object))


@dataclass(frozen=True)
class OperatorMatrix:
    """Hermitian operator stored sparse; ``projector`` marks orthogonal projectors."""

    matrix: sparse.csr_array
    projector: bool = False
    hermitian_tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        m = sparse.csr_array(_linalg.as_sparse(self.matrix), dtype=float)
        if m.shape[0] != m.shape[1]:
            raise InvalidInput(f"operator must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if self.hermiticity_defect() > self.hermitian_tol:
            raise InvalidInput(f"operator is not Hermitian (defect {self.hermiticity_defect():.3g})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> OperatorMatrix:
        return cls(sparse.identity(dim, format="csr"), projector=True)

    @classmethod
    def zero(cls, dim: int) -> OperatorMatrix:
        return cls(sparse.csr_array((dim, dim)), projector=True)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @staticmethod
    def _max_abs(m) -> float:
        m = sparse.coo_array(m)
        return float(np.max(np.abs(m.data))) if m.nnz else 0.0

    def hermiticity_defect(self) -> float:
        return self._max_abs(self.matrix - self.matrix.T)

    def idempotence_defect(self) -> float:
        return self._max_abs(self.matrix @ self.matrix - self.matrix)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        _same_dim(self, other)
        return OperatorMatrix(self.matrix - other.matrix)

    def to_json(self, max_dense_entries: int = DEFAULT.max_dense_entries) -> dict:
        if self.dim * self.dim > max_dense_entries:
            raise BudgetExceeded("dense operator serialization (entries)", self.dim * self.dim,
                                 max_dense_entries)
        return {"dim": self.dim, "entries": self.to_dense().ravel().tolist(),
                "projector": self.projector}

    @classmethod
    def from_json(cls, data: dict) -> OperatorMatrix:
        try:
            dim = int(data["dim"])
            entries = np.asarray(data["entries"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed operator: {exc}") from None
        if entries.size != dim * dim:
            raise InvalidInput(f"operator has {entries.size} entries, expected {dim * dim}")
        return cls(entries.reshape(dim, dim), projector=bool(data.get("projector", False)))

    @classmethod
    def load(cls, path) -> OperatorMatrix:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _same_dim(h1: OperatorMatrix, h2: OperatorMatrix) -> None:
    if h1.dim != h2.dim:
        raise InvalidInput(f"operator dimensions differ: {h1.dim} vs {h2.dim}")


def chi_matrix(A: Tensor, region: Region, *, config: PipelineConfig = DEFAULT) -> sparse.csr_array:
    """Matrix of the map from boundary configurations to physical vectors.

    Column ``C`` holds the contraction of the region's copies of ``A`` with the
    open legs fixed to ``C``.
    """
    cells = region.ordered
    d = A.dim("phys")
    n_rows = d ** len(cells)
    n_cols = region.boundary_dim(A)
    for what, size in (("region physical dimension", n_rows),
                       ("region boundary dimension", n_cols)):
        if size > config.max_operator_dim:
            raise BudgetExceeded(what, size, config.max_operator_dim)

    legs = {leg: (A.coords[:, A.legs.index(leg)] if leg in A.legs
                  else np.zeros(A.nnz, np.int64)).tolist() for leg in VIRTUAL + ("phys",)}
    values = A.values.astype(float).tolist()
    position = {cell: k for k, cell in enumerate(cells)}
    # per cell: legs bonded to an earlier cell, with that cell's opposite leg
    bonds = []
    for k, cell in enumerate(cells):
        bonds.append([(leg, position[nb], _OPPOSITE[leg]) for leg in VIRTUAL
                      if (nb := region.neighbour(cell, leg)) is not None and position[nb] < k])
    by_key = []
    for k in range(len(cells)):
        table: dict = {}
        for e in range(A.nnz):
            table.setdefault(tuple(legs[leg][e] for leg, _, _ in bonds[k]), []).append(e)
        by_key.append(table)
    boundary = region.boundary_legs()
    radix = [A.dim(leg) for _, leg in boundary]

    out: dict = {}
    chosen = [0] * len(cells)

    def visit(k: int, amp: float) -> None:
        if k == len(cells):
            row = 0
            for e in chosen:
                row = row * d + legs["phys"][e]
            col = 0
            for (cell, leg), base in zip(boundary, radix):
                col = col * base + legs[leg][chosen[position[cell]]]
            out[row, col] = out.get((row, col), 0.0) + amp
            return
        key = tuple(legs[other][chosen[j]] for _, j, other in bonds[k])
        for e in by_key[k].get(key, ()):
            chosen[k] = e
            visit(k + 1, amp * values[e])

    visit(0, 1.0)
    entries = [(r, c, v) for (r, c), v in out.items() if v != 0.0]
    rows, cols, vals = zip(*entries) if entries else ((), (), ())
    return sparse.csr_array((vals, (rows, cols)), shape=(n_rows, n_cols))


def image_basis(M, tol: float = DEFAULT.rank_tol) -> np.ndarray:
    """Orthonormal column-space basis as a dense ``(rows, rank)`` array."""
    return _linalg.column_space_basis(M, tol).toarray()


def _image(A: Tensor, region: Region, config: PipelineConfig) -> sparse.csc_array:
    return _linalg.column_space_basis(chi_matrix(A, region, config=config), config.rank_tol)


def parent_term(A: Tensor, pair: Region, *, config: PipelineConfig = DEFAULT) -> OperatorMatrix:
    """``1 - P`` with ``P`` the orthogonal projector onto the image of the region map."""
    basis = _image(A, pair, config)
    dim = basis.shape[0]
    h = sparse.identity(dim, format="csr") - sparse.csr_array(basis @ basis.T)
    h.eliminate_zeros()
    return OperatorMatrix(h, projector=True)


def kernel_basis(h: OperatorMatrix, tol: float = DEFAULT.rank_tol) -> sparse.csc_array:
    return _linalg.kernel_basis(h.matrix, tol)


def check_parent_property(h: OperatorMatrix, A: Tensor, pair: Region, *,
                          config: PipelineConfig = DEFAULT) -> bool:
    """Whether ``Ker h`` equals the image of the region map (mutual containment)."""
    image = _image(A, pair, config)
    if image.shape[0] != h.dim:
        raise InvalidInput(f"operator dim {h.dim} does not match region space {image.shape[0]}")
    kernel = kernel_basis(h, config.rank_tol)
    return _linalg.subspaces_equal(kernel, image, config.rank_tol)


def dominates(h1: OperatorMatrix, h2: OperatorMatrix, tol: float = 1e-10) -> bool:
    """``h1 - h2`` positive semidefinite up to ``-tol``."""
    _same_dim(h1, h2)
    return _linalg.min_eigenvalue(h1.matrix - h2.matrix) >= -tol


def hT_pair_operator(ts: TileSet, orientation: str = HORIZONTAL) -> OperatorMatrix:
    """The classical bulk term on a plaquette pair, in the region basis order."""
    return OperatorMatrix(bulk_term_matrix(ts, orientation), projector=True)


# --- composed tensors ------------------------------------------------------

def _digits(index: int, base: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        index, rem = divmod(index, base)
        out.append(rem)
    return out[::-1]


def _placement(sources: int, target_dim: int, place) -> sparse.csr_array:
    """0/1 isometry with column ``src`` mapped to row ``place(src)``."""
    rows = [place(src) for src in range(sources)]
    return sparse.csr_array((np.ones(sources), (rows, range(sources))), shape=(target_dim, sources))


def check_image_decomposition(A_G: Tensor, A_Z: Tensor, A_T: Tensor, region: Region, *,
                              config: PipelineConfig = DEFAULT,
                              block_order: tuple[str, str] = ("G", "ZT")) -> bool:
    """Compare the image of ``A_G (+) (A_Z (x) A_T)`` with the block-embedded
    ``Im(A_G) (+) (Im(A_Z) (x) Im(A_T))``.

    ``block_order=("ZT", "G")`` embeds the expected side with the blocks swapped;
    it exists as a negative control.
    """
    if not (A_G.legs == A_Z.legs == A_T.legs):
        raise InvalidInput(f"leg labels differ: {A_G.legs}, {A_Z.legs}, {A_T.legs}")
    if sorted(block_order) != ["G", "ZT"]:
        raise InvalidInput(f"block_order must order 'G' and 'ZT', got {block_order!r}")
    composed = direct_sum(A_G, tensor_product(A_Z, A_T))
    actual = _image(composed, region, config)

    k = len(region.cells)
    dG, dZ, dT = A_G.dim("phys"), A_Z.dim("phys"), A_T.dim("phys")
    d = dG + dZ * dT
    g_off, zt_off = (0, dG) if block_order[0] == "G" else (dZ * dT, 0)

    def join(local) -> int:
        idx = 0
        for x in local:
            idx = idx * d + x
        return idx

    emb_g = _placement(dG ** k, d ** k,
                       lambda src: join(g_off + x for x in _digits(src, dG, k)))

    def zt_place(src: int) -> int:
        # Kronecker order of the two images: all Z digits, then all T digits
        z = _digits(src // dT ** k, dZ, k)
        t = _digits(src % dT ** k, dT, k)
        return join(zt_off + zi * dT + ti for zi, ti in zip(z, t))

    emb_zt = _placement(dZ ** k * dT ** k, d ** k, zt_place)
    img_zt = sparse.kron(_image(A_Z, region, config), _image(A_T, region, config), format="csr")
    expected = sparse.hstack([emb_g @ _image(A_G, region, config), emb_zt @ img_zt], format="csc")
    return _linalg.subspaces_equal(actual, expected, config.rank_tol)


def _zt_pair_embedding(dims: tuple[int, int, int]) -> sparse.csr_array:
    """Isometry from ``(z1, z2, t1, t2)`` order into the composed pair space."""
    d1, dZ, dT = dims
    d = d1 + dZ * dT
    rows, cols = [], []
    for src, (z1, z2, t1, t2) in enumerate(product(range(dZ), range(dZ), range(dT), range(dT))):
        rows.append((d1 + z1 * dT + t1) * d + (d1 + z2 * dT + t2))
        cols.append(src)
    return sparse.csr_array((np.ones(len(rows)), (rows, cols)), shape=(d * d, len(cols)))


def _check_dims(dims) -> tuple[int, int, int]:
    try:
        d1, dZ, dT = (int(x) for x in dims)
    except (TypeError, ValueError):
        raise InvalidInput(f"dims must be three integers, got {dims!r}") from None
    if min(d1, dZ, dT) < 1:
        raise InvalidInput(f"dims must be positive, got {dims!r}")
    return d1, dZ, dT


def compose_gap_term(hZ: OperatorMatrix, hT: OperatorMatrix, dims=(1, 2, 2)) -> OperatorMatrix:
    """Pair term on ``(H1 (+) H2 (x) HGamma)`` squared.

    Cross penalties ``P1 (x) Pzt + Pzt (x) P1`` forbid mixing the trivial
    block with the composed one; inside the composed block ``hZ (x) 1 + 1 (x) hT``
    acts on the ``Z`` and ``T`` factors separately. ``Pzt`` is the projector
    onto the composed block.
    """
    d1, dZ, dT = _check_dims(dims)
    if hZ.dim != dZ * dZ or hT.dim != dT * dT:
        raise InvalidInput(f"expected hZ of dim {dZ * dZ} and hT of dim {dT * dT}, "
                           f"got {hZ.dim} and {hT.dim}")
    p1 = sparse.diags_array(np.r_[np.ones(d1), np.zeros(dZ * dT)], format="csr")
    pzt = sparse.diags_array(np.r_[np.zeros(d1), np.ones(dZ * dT)], format="csr")
    cross = sparse.kron(p1, pzt) + sparse.kron(pzt, p1)
    inner = (sparse.kron(hZ.matrix, sparse.identity(dT * dT))
             + sparse.kron(sparse.identity(dZ * dZ), hT.matrix))
    emb = _zt_pair_embedding((d1, dZ, dT))
    h = sparse.csr_array(cross + emb @ inner @ emb.T)
    h.eliminate_zeros()
    return OperatorMatrix(h)


def embed_gap_kernel(basis_z, basis_t, dims=(1, 2, 2)) -> sparse.csc_array:
    """``H1 (x) H1`` together with ``span(basis_z) (x) span(basis_t)`` in the pair space.

    ``basis_z`` and ``basis_t`` have pair-space rows ``(z1, z2)`` and ``(t1, t2)``.
    """
    d1, dZ, dT = _check_dims(dims)
    basis_z, basis_t = _linalg.as_sparse(basis_z), _linalg.as_sparse(basis_t)
    if basis_z.shape[0] != dZ * dZ or basis_t.shape[0] != dT * dT:
        raise InvalidInput(f"basis rows {basis_z.shape[0]}, {basis_t.shape[0]} do not match dims {dims}")
    d = d1 + dZ * dT
    trivial_rows = [a * d + b for a in range(d1) for b in range(d1)]
    trivial = sparse.csc_array((np.ones(len(trivial_rows)),
                                (trivial_rows, range(len(trivial_rows)))),
                               shape=(d * d, len(trivial_rows)))
    # (z1 z2) (x) (t1 t2) is exactly the (z1, z2, t1, t2) order of the embedding
    inner = sparse.kron(basis_z, basis_t, format="csc")
    return sparse.hstack([trivial, _zt_pair_embedding((d1, dZ, dT)) @ inner], format="csc")


def gap_kernel_matches(h: OperatorMatrix, basis_z, basis_t, dims=(1, 2, 2), *,
                       tol: float = DEFAULT.rank_tol) -> bool:
    """Whether ``Ker h`` equals :func:`embed_gap_kernel` of the given bases."""
    expected = embed_gap_kernel(basis_z, basis_t, dims)
    return _linalg.subspaces_equal(kernel_basis(h, tol), expected, tol)
