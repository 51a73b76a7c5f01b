"""The classical commuting Hamiltonian of a bounded tiling instance.

Every plaquette carries four colour degrees of freedom ``(u, d, l, r)``.
Bulk terms penalise neighbouring plaquettes that are not both tiles or
disagree on their shared edge; boundary terms penalise a plaquette that is
not a tile or disagrees with the fixed colour on a boundary link. All terms
are diagonal in the colour basis, so energies are evaluated on basis
configurations directly.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import sparse

from .config import DEFAULT, PipelineConfig
from .errors import BudgetExceeded, InvalidInput
from .tiling import DOWN, LEFT, RIGHT, UP, BTInstance, TileSet, Tiling, transpose_instance

HORIZONTAL, VERTICAL = "horizontal", "vertical"
_SIDE_SLOT = {"top": UP, "bottom": DOWN, "left": LEFT, "right": RIGHT}

PlaquetteConfig = Sequence[Sequence[tuple]]


def bulk_term_energy(ts: TileSet, cp, cq, orientation: str) -> int:
    """Energy of one bulk term on the basis state ``cp (x) cq``.

    ``horizontal``: ``cq`` is the left neighbour of ``cp`` (test ``cp.l == cq.r``).
    ``vertical``: ``cq`` sits above ``cp`` (test ``cp.u == cq.d``).
    """
    cp, cq = tuple(cp), tuple(cq)
    if cp not in ts or cq not in ts:
        return 1
    if orientation == HORIZONTAL:
        return int(cp[LEFT] != cq[RIGHT])
    if orientation == VERTICAL:
        return int(cp[UP] != cq[DOWN])
    raise InvalidInput(f"orientation must be {HORIZONTAL!r} or {VERTICAL!r}, got {orientation!r}")


def boundary_term_energy(ts: TileSet, side: str, color: str, c) -> int:
    try:
        slot = _SIDE_SLOT[side]
    except KeyError:
        raise InvalidInput(f"unknown side {side!r}") from None
    c = tuple(c)
    return int(c not in ts or c[slot] != color)


def _check_config(inst: BTInstance, cfg) -> None:
    if len(cfg) != inst.rows or any(len(row) != inst.cols for row in cfg):
        raise InvalidInput(f"configuration shape does not match {inst.rows}x{inst.cols}")
    palette = inst.tileset.color_index
    for row in cfg:
        for cell in row:
            if len(cell) != 4 or any(x not in palette for x in cell):
                raise InvalidInput(f"plaquette {cell!r} is not a 4-tuple of known colours")


def total_energy(inst: BTInstance, cfg: PlaquetteConfig) -> int:
    """Sum of all bulk and boundary terms; corners get one term per boundary link."""
    _check_config(inst, cfg)
    ts, b = inst.tileset, inst.boundary
    m, n = inst.rows, inst.cols
    energy = 0
    for r in range(m):
        for c in range(n):
            cell = cfg[r][c]
            if c + 1 < n:
                energy += bulk_term_energy(ts, cfg[r][c + 1], cell, HORIZONTAL)
            if r + 1 < m:
                energy += bulk_term_energy(ts, cell, cfg[r + 1][c], VERTICAL)
            if r == 0:
                energy += boundary_term_energy(ts, "bottom", b["bottom"][c], cell)
            if r == m - 1:
                energy += boundary_term_energy(ts, "top", b["top"][c], cell)
            if c == 0:
                energy += boundary_term_energy(ts, "left", b["left"][r], cell)
            if c == n - 1:
                energy += boundary_term_energy(ts, "right", b["right"][r], cell)
    return energy


def config_from_tiling(inst: BTInstance, tiling: Tiling) -> list[list[tuple]]:
    tiles = inst.tileset.tiles
    return [[tiles[i] for i in row] for row in tiling.indices]


def tiling_from_config(inst: BTInstance, cfg: PlaquetteConfig) -> Tiling | None:
    """Tile indices of ``cfg``, or ``None`` if some plaquette is not a tile."""
    index = inst.tileset.tile_index
    try:
        return Tiling([[index[tuple(cell)] for cell in row] for row in cfg])
    except KeyError:
        return None


_JUNK = -1


def _min_energy_dp(inst: BTInstance, first_choice: int | None = None) -> int | None:
    """Exact minimum via a row-major frontier over per-plaquette choices.

    A plaquette outside T violates every term touching it whatever its
    colours, so its choices collapse to a single junk option.
    """
    ts, b = inst.tileset, inst.boundary
    m, n = inst.rows, inst.cols
    tiles = ts.tiles
    n_colors = len(ts.colors)
    choices = list(range(len(tiles)))
    if len(tiles) < n_colors**4:
        choices.append(_JUNK)

    def boundary_cost(x, r, c):
        cost = 0
        if r == 0:
            cost += x == _JUNK or tiles[x][DOWN] != b["bottom"][c]
        if r == m - 1:
            cost += x == _JUNK or tiles[x][UP] != b["top"][c]
        if c == 0:
            cost += x == _JUNK or tiles[x][LEFT] != b["left"][r]
        if c == n - 1:
            cost += x == _JUNK or tiles[x][RIGHT] != b["right"][r]
        return int(cost)

    def pair_cost(below_or_left, x, vertical):
        if below_or_left == _JUNK or x == _JUNK:
            return 1
        if vertical:
            return int(tiles[below_or_left][UP] != tiles[x][DOWN])
        return int(tiles[below_or_left][RIGHT] != tiles[x][LEFT])

    frontier = {(None,) * n: 0}
    for r in range(m):
        for c in range(n):
            opts = choices
            if r == 0 and c == 0 and first_choice is not None:
                opts = [first_choice]
            nxt: dict = {}
            for key, e in frontier.items():
                for x in opts:
                    cost = e + boundary_cost(x, r, c)
                    if r > 0:
                        cost += pair_cost(key[c], x, True)
                    if c > 0:
                        cost += pair_cost(key[c - 1], x, False)
                    new_key = key[:c] + (x,) + key[c + 1:]
                    if cost < nxt.get(new_key, cost + 1):
                        nxt[new_key] = cost
            frontier = nxt
    return min(frontier.values()) if frontier else None


def ground_energy(inst: BTInstance, *, config: PipelineConfig = DEFAULT) -> int:
    """Exact minimum of :func:`total_energy` over all plaquette configurations."""
    if inst.cells > config.max_energy_cells:
        raise BudgetExceeded("exact energy minimization (plaquettes)", inst.cells,
                             config.max_energy_cells)
    if inst.cols > inst.rows:
        inst = transpose_instance(inst)
    if config.threads <= 1:
        return _min_energy_dp(inst)
    firsts = list(range(len(inst.tileset.tiles)))
    if len(firsts) < len(inst.tileset.colors) ** 4:
        firsts.append(_JUNK)
    with ThreadPoolExecutor(config.threads) as pool:
        parts = list(pool.map(lambda x: _min_energy_dp(inst, x), firsts))
    return min(parts)


ALPHA = Fraction(2, 3)
BETA = Fraction(1, 3)


def clh_decide(inst: BTInstance, alpha=ALPHA, beta=BETA, *,
               config: PipelineConfig = DEFAULT) -> str:
    """``"YES"`` when the ground energy is at most ``beta``, ``"NO"`` when at least ``alpha``."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not beta < alpha:
        raise InvalidInput(f"need beta < alpha, got alpha={alpha}, beta={beta}")
    e = ground_energy(inst, config=config)
    if e <= beta:
        return "YES"
    if e >= alpha:
        return "NO"
    # integral spectrum: only thresholds more than 1 apart can leave a gap
    raise InvalidInput(f"promise violated: ground energy {e} lies in ({beta}, {alpha})")


def encode_plaquette(ts: TileSet, cell) -> int:
    """Lexicographic index of ``(u, d, l, r)`` in ``Gamma**4`` (``u`` most significant)."""
    k = len(ts.colors)
    idx = 0
    for x in cell:
        idx = idx * k + ts.color_index[x]
    return idx


def bulk_term_matrix(ts: TileSet, orientation: str = HORIZONTAL) -> sparse.csr_array:
    """Materialize a bulk term on ``(Gamma**4)**2`` as a sparse 0/1 matrix.

    Basis order is ``(first, second)`` with ``first`` the left plaquette
    (horizontal) or the lower one (vertical).
    """
    if orientation not in (HORIZONTAL, VERTICAL):
        raise InvalidInput(f"unknown orientation {orientation!r}")
    d = len(ts.colors) ** 4
    diag = np.ones(d * d)
    for w in ts.tiles:
        for w2 in ts.tiles:
            first, second = w, w2
            if orientation == HORIZONTAL:
                e = bulk_term_energy(ts, second, first, HORIZONTAL)
            else:
                e = bulk_term_energy(ts, first, second, VERTICAL)
            if e == 0:
                diag[encode_plaquette(ts, first) * d + encode_plaquette(ts, second)] = 0.0
    return sparse.diags_array(diag, format="csr")


def boundary_term_matrix(ts: TileSet, side: str, color: str) -> sparse.csr_array:
    d = len(ts.colors) ** 4
    diag = np.ones(d)
    for w in ts.tiles:
        if boundary_term_energy(ts, side, color, w) == 0:
            diag[encode_plaquette(ts, w)] = 0.0
    return sparse.diags_array(diag, format="csr")


def is_diagonal(m) -> bool:
    m = sparse.coo_array(m)
    return bool(np.all((m.row == m.col) | (m.data == 0)))


def load_config(path) -> list[list[tuple]]:
    """Read ``{"plaquettes": [[[u, d, l, r], ...], ...]}`` (row 0 = bottom)."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        return [[tuple(cell) for cell in row] for row in data["plaquettes"]]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed configuration: {exc}") from None
