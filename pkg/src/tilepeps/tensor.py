"""PEPS tensors built from tile sets, direct-sum/product combinators, and exact
zero-testing by contraction of the double layer.

Tensors are stored as coordinate lists (nonzero entries only): the tensors
of a compiled Turing-machine tile set have ``|Gamma|**8`` nominal entries
but only ``|T|`` nonzeros. Contraction sweeps the lattice site by site and
keeps the boundary as a sparse map, so the cost tracks the number of
reachable boundary configurations rather than the nominal row dimension.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, PipelineConfig
from .errors import BudgetExceeded, InvalidInput
from .tiling import BTInstance, TileSet

VIRTUAL = ("up", "down", "left", "right")
LEGS = VIRTUAL + ("phys",)
_SLOT = {leg: i for i, leg in enumerate(VIRTUAL)}
_OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}


@dataclass(frozen=True, eq=False)
class Tensor:
    """Sparse labelled tensor. Legs are kept in the order up, down, left, right, phys.

    ``values`` is an integer array (exact mode) or a float array (float mode).
    """

    legs: tuple[str, ...]
    shape: tuple[int, ...]
    coords: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        legs, shape = tuple(self.legs), tuple(int(d) for d in self.shape)
        if len(set(legs)) != len(legs) or any(leg not in LEGS for leg in legs):
            raise InvalidInput(f"bad leg labels {legs}")
        if len(shape) != len(legs):
            raise InvalidInput("one dimension per leg required")
        if any(d < 0 for d in shape):
            raise InvalidInput(f"negative leg dimension in {shape}")
        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, len(legs))
        values = np.asarray(self.values)
        if values.dtype.kind in "biu":
            values = values.astype(np.int64)
        elif values.dtype.kind == "f" or values.size == 0:
            values = values.astype(np.float64 if values.dtype.kind == "f" else np.int64)
        else:
            raise InvalidInput(f"unsupported entry type {values.dtype}")
        if len(values) != len(coords):
            raise InvalidInput("coords and values disagree in length")
        if len(coords) and (np.any(coords < 0) or np.any(coords >= np.array(shape))):
            raise InvalidInput("coordinate outside tensor shape")
        # canonical leg order
        perm = sorted(range(len(legs)), key=lambda i: LEGS.index(legs[i]))
        legs = tuple(legs[i] for i in perm)
        shape = tuple(shape[i] for i in perm)
        coords = coords[:, perm]
        # merge duplicates, drop zeros, sort lexicographically
        if len(coords):
            flat = np.ravel_multi_index(coords.T, shape) if shape else np.zeros(len(coords), np.int64)
            order = np.argsort(flat, kind="stable")
            flat, values = flat[order], values[order]
            uniq, start = np.unique(flat, return_index=True)
            values = np.add.reduceat(values, start) if len(values) else values
            keep = values != 0
            coords = np.stack(np.unravel_index(uniq[keep], shape), axis=1) if shape else np.zeros((int(keep.sum()), 0), np.int64)
            values = values[keep]
        object.__setattr__(self, "legs", legs)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "coords", coords.astype(np.int64).reshape(-1, len(legs)))
        object.__setattr__(self, "values", values)

    @property
    def exact(self) -> bool:
        return self.values.dtype.kind == "i"

    @property
    def dims(self) -> dict[str, int]:
        return dict(zip(self.legs, self.shape))

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def dim(self, leg: str) -> int:
        return self.dims.get(leg, 1)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=self.values.dtype)
        if self.nnz:
            out[tuple(self.coords.T)] = self.values
        return out

    @classmethod
    def from_dense(cls, legs, array) -> Tensor:
        array = np.asarray(array)
        idx = np.nonzero(array)
        coords = np.stack(idx, axis=1) if array.ndim else np.zeros((int(array != 0), 0))
        return cls(tuple(legs), array.shape, coords, array[idx])

    def relabel(self, mapping: dict[str, str]) -> Tensor:
        return Tensor(tuple(mapping.get(leg, leg) for leg in self.legs), self.shape,
                      self.coords, self.values)

    def as_float(self) -> Tensor:
        return Tensor(self.legs, self.shape, self.coords, self.values.astype(np.float64))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.nnz else 0.0

    def to_json(self, max_dense_entries: int = DEFAULT.max_dense_tensor_entries) -> dict:
        out = {
            "legs": [{"label": leg, "dim": d} for leg, d in zip(self.legs, self.shape)],
            "mode": "exact" if self.exact else "float",
        }
        if self.size <= max_dense_entries:
            out["entries"] = self.to_dense().ravel().tolist()
        else:
            out["nonzeros"] = [list(map(int, c)) + [v] for c, v in
                               zip(self.coords.tolist(), self.values.tolist())]
        return out

    @classmethod
    def from_json(cls, data: dict) -> Tensor:
        try:
            legs = tuple(leg["label"] for leg in data["legs"])
            shape = tuple(int(leg["dim"]) for leg in data["legs"])
            mode = data.get("mode")
            if "entries" in data:
                flat = data["entries"]
                if len(flat) != math.prod(shape):
                    raise InvalidInput(f"{len(flat)} entries for shape {shape}")
                dtype = _json_dtype(flat, mode)
                return cls.from_dense(legs, np.array(flat, dtype=dtype).reshape(shape))
            rows = data["nonzeros"]
            coords = np.array([r[:-1] for r in rows], dtype=np.int64).reshape(-1, len(legs))
            vals = [r[-1] for r in rows]
            return cls(legs, shape, coords, np.array(vals, dtype=_json_dtype(vals, mode)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed tensor: {exc}") from None


def _json_dtype(values, mode):
    if mode == "exact":
        if not all(isinstance(v, int) for v in values):
            raise InvalidInput("exact-mode tensor with non-integer entries")
        return np.int64
    if mode == "float":
        return np.float64
    return np.int64 if all(isinstance(v, int) for v in values) else np.float64


def _encode(ts: TileSet, tile) -> int:
    k = len(ts.colors)
    idx = 0
    for x in tile:
        idx = idx * k + ts.color_index[x]
    return idx


def bulk_tensor(ts: TileSet) -> Tensor:
    """``A[u, d, l, r, s] = 1`` iff ``(u, d, l, r)`` is a tile and ``s`` encodes it."""
    return boundary_tensor(ts, {})


def boundary_tensor(ts: TileSet, fixed: dict[str, str]) -> Tensor:
    """Tile tensor with the virtual legs in ``fixed`` removed and pinned to colours.

    ``fixed`` maps a subset of up/down/left/right to colours; an empty map
    gives the bulk tensor. The physical leg keeps the full tile.
    """
    for leg, color in fixed.items():
        if leg not in _SLOT:
            raise InvalidInput(f"cannot pin non-virtual leg {leg!r}")
        if color not in ts.color_index:
            raise InvalidInput(f"pinned colour {color!r} not in tile set")
    free = [leg for leg in VIRTUAL if leg not in fixed]
    k = len(ts.colors)
    coords = []
    for tile in ts.tiles:
        if all(tile[_SLOT[leg]] == color for leg, color in fixed.items()):
            coords.append([ts.color_index[tile[_SLOT[leg]]] for leg in free] + [_encode(ts, tile)])
    shape = (k,) * len(free) + (k**4,)
    return Tensor(tuple(free) + ("phys",), shape,
                  np.array(coords, dtype=np.int64).reshape(-1, len(free) + 1),
                  np.ones(len(coords), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class PepsGrid:
    """``sites[r][c]`` for plaquette ``(r, c)`` with row 0 at the bottom.

    Open grids: legs pointing off the lattice are either absent or of
    dimension 1. Periodic grids wrap both directions.
    """

    sites: tuple[tuple[Tensor, ...], ...]
    periodic: bool = False

    def __post_init__(self):
        sites = tuple(tuple(row) for row in self.sites)
        object.__setattr__(self, "sites", sites)
        if not sites or not sites[0] or any(len(row) != len(sites[0]) for row in sites):
            raise InvalidInput("grid must be a non-empty rectangle")
        kinds = {t.exact for row in sites for t in row}
        if len(kinds) > 1:
            raise InvalidInput("exact and float tensors cannot be mixed in one grid")
        m, n = self.rows, self.cols
        for r in range(m):
            for c in range(n):
                t = sites[r][c]
                if "phys" not in t.legs:
                    raise InvalidInput(f"site {(r, c)} lacks a physical leg")
                for leg, (dr, dc) in (("up", (1, 0)), ("right", (0, 1))):
                    rr, cc = r + dr, c + dc
                    inside = rr < m and cc < n
                    if self.periodic:
                        rr, cc, inside = rr % m, cc % n, True
                    if inside:
                        other = sites[rr][cc]
                        if t.dim(leg) != other.dim(_OPPOSITE[leg]):
                            raise InvalidInput(f"leg {leg} of site {(r, c)} mismatches its neighbour")
                if not self.periodic:
                    for leg, off in (("down", r == 0), ("up", r == m - 1),
                                     ("left", c == 0), ("right", c == n - 1)):
                        if off and t.dim(leg) != 1:
                            raise InvalidInput(f"open boundary leg {leg} of site {(r, c)} must be absent or 1-dim")

    @property
    def rows(self) -> int:
        return len(self.sites)

    @property
    def cols(self) -> int:
        return len(self.sites[0])

    @property
    def exact(self) -> bool:
        return self.sites[0][0].exact

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    def transpose(self) -> PepsGrid:
        """Mirror across the main diagonal; contraction values are unchanged."""
        swap = {"up": "right", "right": "up", "down": "left", "left": "down"}
        sites = [[self.sites[r][c].relabel(swap) for r in range(self.rows)] for c in range(self.cols)]
        return PepsGrid(sites, self.periodic)

    def to_json(self, max_dense_entries: int = DEFAULT.max_dense_tensor_entries) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "periodic": self.periodic,
            "mode": self.mode,
            "tensors": [[t.to_json(max_dense_entries) for t in row] for row in self.sites],
        }

    @classmethod
    def from_json(cls, data: dict) -> PepsGrid:
        try:
            sites = [[Tensor.from_json(t) for t in row] for row in data["tensors"]]
            grid = cls(sites, bool(data.get("periodic", False)))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed grid: {exc}") from None
        if (grid.rows, grid.cols) != (data.get("rows", grid.rows), data.get("cols", grid.cols)):
            raise InvalidInput("grid rows/cols disagree with the tensor array")
        return grid

    @classmethod
    def load(cls, path) -> PepsGrid:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def assemble_peps(inst: BTInstance) -> PepsGrid:
    """Bulk tensors inside, boundary tensors pinned to the instance's boundary colours."""
    ts, b = inst.tileset, inst.boundary
    m, n = inst.rows, inst.cols
    sites = []
    for r in range(m):
        row = []
        for c in range(n):
            fixed = {}
            if r == 0:
                fixed["down"] = b["bottom"][c]
            if r == m - 1:
                fixed["up"] = b["top"][c]
            if c == 0:
                fixed["left"] = b["left"][r]
            if c == n - 1:
                fixed["right"] = b["right"][r]
            row.append(boundary_tensor(ts, fixed))
        sites.append(row)
    return PepsGrid(sites)


# --- contraction -----------------------------------------------------------

def _scalars(t: Tensor) -> list:
    return t.values.tolist()  # Python ints in exact mode


def _leg_columns(t: Tensor):
    """Per-entry virtual indices (0 for absent legs) and the physical index."""
    cols = {leg: t.coords[:, i] for i, leg in enumerate(t.legs)}
    zero = np.zeros(t.nnz, dtype=np.int64)
    return [cols.get(leg, zero).tolist() for leg in VIRTUAL], cols["phys"].tolist()


def _double_layer(t: Tensor) -> dict:
    """Nonzeros of ``E = sum_s A(s) (x) conj(A(s))`` keyed by (down, left) -> [(up, right, value)].

    Double-layer indices pair ket and bra: ``i * D + i'``.
    """
    (u, d, l, r), s = _leg_columns(t)
    vals = _scalars(t)
    D = {leg: t.dim(leg) for leg in VIRTUAL}
    by_phys = defaultdict(list)
    for k, p in enumerate(s):
        by_phys[p].append(k)
    acc: dict = defaultdict(int)
    for group in by_phys.values():
        for a in group:
            for b in group:
                key = (u[a] * D["up"] + u[b], d[a] * D["down"] + d[b],
                       l[a] * D["left"] + l[b], r[a] * D["right"] + r[b])
                acc[key] += vals[a] * vals[b]
    out: dict = defaultdict(list)
    for (uu, dd, ll, rr), v in sorted(acc.items()):
        if v:
            out[(dd, ll)].append((uu, rr, v))
    return out


def _guard(support: int, config: PipelineConfig, what: str) -> None:
    if support > config.max_boundary_support:
        raise BudgetExceeded(what, support, config.max_boundary_support)


def _contract_open(grid: PepsGrid, config: PipelineConfig):
    m, n = grid.rows, grid.cols
    zero = 0 if grid.exact else 0.0
    one = 1 if grid.exact else 1.0
    frontier = {((0,) * n, 0): one}
    for r in range(m):
        for c in range(n):
            E = _double_layer(grid.sites[r][c])
            nxt: dict = defaultdict(lambda: zero)
            for (cols, carry), val in frontier.items():
                left = carry if c > 0 else 0
                for up, right, e in E.get((cols[c], left), ()):
                    key = (cols[:c] + (up,) + cols[c + 1:], right)
                    nxt[key] += val * e
            frontier = {k: v for k, v in nxt.items() if v != 0}
            _guard(len(frontier), config, "double-layer boundary support")
        frontier = {(cols, 0): v for (cols, carry), v in frontier.items() if carry == 0}
    return frontier.get(((0,) * n, 0), zero)


def _row_transfer_periodic(row: tuple[Tensor, ...], config: PipelineConfig, exact: bool) -> dict:
    """Double-layer transfer of one periodic row: bottom indices -> top indices -> value."""
    layers = [_double_layer(t) for t in row]
    n = len(row)
    zero = 0 if exact else 0.0
    frontier: dict = defaultdict(lambda: zero)
    for (d, l), entries in layers[0].items():
        for u, r, e in entries:
            frontier[((d,), (u,), l, r)] += e
    for c in range(1, n):
        by_left: dict = defaultdict(list)
        for (d, l), entries in layers[c].items():
            for u, r, e in entries:
                by_left[l].append((d, u, r, e))
        nxt: dict = defaultdict(lambda: zero)
        for (bot, top, first, carry), val in frontier.items():
            for d, u, r, e in by_left.get(carry, ()):
                nxt[(bot + (d,), top + (u,), first, r)] += val * e
        frontier = {k: v for k, v in nxt.items() if v != 0}
        _guard(len(frontier), config, "periodic row transfer support")
    transfer: dict = defaultdict(lambda: defaultdict(lambda: zero))
    for (bot, top, first, carry), val in frontier.items():
        if carry == first:
            transfer[bot][top] += val
    return transfer


def _contract_periodic(grid: PepsGrid, config: PipelineConfig):
    zero = 0 if grid.exact else 0.0
    transfers = [_row_transfer_periodic(row, config, grid.exact) for row in grid.sites]
    total = zero
    for start in sorted(transfers[0]):
        vec = {start: 1 if grid.exact else 1.0}
        for T in transfers:
            nxt: dict = defaultdict(lambda: zero)
            for key, w in vec.items():
                for top, t in T.get(key, {}).items():
                    nxt[top] += w * t
            vec = {k: v for k, v in nxt.items() if v != 0}
            if not vec:
                break
        total += vec.get(start, zero)
    return total


def norm_squared(grid: PepsGrid, *, order: str = "rows", config: PipelineConfig = DEFAULT):
    """``<Phi|Phi>`` by exact double-layer contraction, sweeping rows or columns.

    Exact-mode grids give a Python ``int``; for tile tensors it equals the
    number of valid tilings. Float-mode grids give a ``float``.
    """
    if order == "columns":
        grid = grid.transpose()
    elif order != "rows":
        raise InvalidInput(f"order must be 'rows' or 'columns', got {order!r}")
    if grid.periodic:
        return _contract_periodic(grid, config)
    return _contract_open(grid, config)


def _zero_scale(grid: PepsGrid) -> float:
    return math.prod(t.max_abs() ** 2 for row in grid.sites for t in row)


def zero_test_open(grid: PepsGrid, *, config: PipelineConfig = DEFAULT) -> bool:
    """True iff the state of ``grid`` is the zero vector."""
    value = norm_squared(grid, config=config)
    if grid.exact:
        return value == 0
    return abs(value) <= config.float_zero_tol * _zero_scale(grid)


def torus_grid(A: Tensor, lx: int, ly: int) -> PepsGrid:
    if lx < 1 or ly < 1:
        raise InvalidInput(f"torus sides must be positive, got {lx}x{ly}")
    return PepsGrid([[A] * lx for _ in range(ly)], periodic=True)


def zero_test_torus(ts: TileSet, lx: int, ly: int, *, config: PipelineConfig = DEFAULT) -> bool:
    """True iff the bulk tile tensor patched around the ``lx x ly`` torus gives zero."""
    grid = torus_grid(bulk_tensor(ts), lx, ly)
    # the row transfer grows with row length, so sweep along the longer side
    return norm_squared(grid, order="columns" if lx > ly else "rows", config=config) == 0


def amplitudes(grid: PepsGrid, *, config: PipelineConfig = DEFAULT) -> dict[tuple[int, ...], object]:
    """Nonzero amplitudes of an open grid, keyed by physical indices in row-major order."""
    if grid.periodic:
        raise InvalidInput("amplitudes are only implemented for open grids")
    m, n = grid.rows, grid.cols
    zero = 0 if grid.exact else 0.0
    frontier = {((0,) * n, 0, ()): 1 if grid.exact else 1.0}
    for r in range(m):
        for c in range(n):
            t = grid.sites[r][c]
            (u, d, l, rt), s = _leg_columns(t)
            vals = _scalars(t)
            by_dl = defaultdict(list)
            for k in range(t.nnz):
                by_dl[(d[k], l[k])].append((u[k], rt[k], s[k], vals[k]))
            nxt: dict = defaultdict(lambda: zero)
            for (cols, carry, phys), val in frontier.items():
                left = carry if c > 0 else 0
                for up, right, p, e in by_dl.get((cols[c], left), ()):
                    nxt[(cols[:c] + (up,) + cols[c + 1:], right, phys + (p,))] += val * e
            frontier = {k: v for k, v in nxt.items() if v != 0}
            _guard(len(frontier), config, "single-layer boundary support")
    return {phys: v for (cols, carry, phys), v in sorted(frontier.items())
            if carry == 0 and not any(cols)}


# --- combinators -----------------------------------------------------------

def _require_same_legs(A: Tensor, B: Tensor) -> None:
    if A.legs != B.legs:
        raise InvalidInput(f"leg labels differ: {A.legs} vs {B.legs}")


def _combined_values(A: Tensor, B: Tensor, vals):
    dtype = np.int64 if (A.exact and B.exact) else np.float64
    return np.asarray(vals, dtype=dtype)


def direct_sum(A: Tensor, B: Tensor) -> Tensor:
    """Block sum on every leg: ``A`` occupies the leading block, ``B`` the trailing one."""
    _require_same_legs(A, B)
    shape = tuple(a + b for a, b in zip(A.shape, B.shape))
    coords = np.concatenate([A.coords, B.coords + np.array(A.shape, dtype=np.int64)])
    vals = np.concatenate([A.values, B.values])
    return Tensor(A.legs, shape, coords.reshape(-1, len(A.legs)), _combined_values(A, B, vals))


def tensor_product(A: Tensor, B: Tensor) -> Tensor:
    """Kronecker product on every leg (``A`` index major)."""
    _require_same_legs(A, B)
    shape = tuple(a * b for a, b in zip(A.shape, B.shape))
    if A.nnz == 0 or B.nnz == 0:
        return Tensor(A.legs, shape, np.zeros((0, len(A.legs)), np.int64),
                      _combined_values(A, B, []))
    ia = np.repeat(np.arange(A.nnz), B.nnz)
    ib = np.tile(np.arange(B.nnz), A.nnz)
    coords = A.coords[ia] * np.array(B.shape, dtype=np.int64) + B.coords[ib]
    vals = A.values[ia] * B.values[ib]
    return Tensor(A.legs, shape, coords, _combined_values(A, B, vals))


def random_tensor(rng: np.random.Generator, virtual: dict[str, int], phys: int,
                  *, density: float = 1.0) -> Tensor:
    """Float tensor with standard-normal entries (a fraction ``density`` kept)."""
    legs = [leg for leg in VIRTUAL if leg in virtual]
    shape = tuple(virtual[leg] for leg in legs) + (phys,)
    data = rng.standard_normal(shape)
    if density < 1.0:
        data *= rng.random(shape) < density
    return Tensor.from_dense(tuple(legs) + ("phys",), data)

