"""Bounded tiling instances: exhaustive solving, exact counting, torus counting.

Lattice convention: plaquette ``(r, c)`` has row ``r`` counted from the
bottom and column ``c`` from the left. A tile is ``(u, d, l, r)``; the
``u`` colour of ``(r, c)`` is shared with the ``d`` colour of ``(r + 1, c)``
and the ``r`` colour of ``(r, c)`` with the ``l`` colour of ``(r, c + 1)``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .config import DEFAULT, PipelineConfig
from .errors import BudgetExceeded, InvalidInput

UP, DOWN, LEFT, RIGHT = range(4)
SIDES = ("top", "bottom", "left", "right")

Tile = tuple[str, str, str, str]


@dataclass(frozen=True)
class TileSet:
    colors: tuple[str, ...]
    tiles: tuple[Tile, ...]

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        object.__setattr__(self, "tiles", tuple(tuple(t) for t in self.tiles))
        if len(set(self.colors)) != len(self.colors):
            raise InvalidInput("duplicate colours in tile set")
        palette = set(self.colors)
        for t in self.tiles:
            if len(t) != 4:
                raise InvalidInput(f"tile {t!r} is not a 4-tuple")
            bad = [c for c in t if c not in palette]
            if bad:
                raise InvalidInput(f"tile {t!r} uses undeclared colour(s) {bad}")
        if len(set(self.tiles)) != len(self.tiles):
            raise InvalidInput("duplicate tiles in tile set")

    @cached_property
    def color_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.colors)}

    @cached_property
    def tile_index(self) -> dict[Tile, int]:
        return {t: i for i, t in enumerate(self.tiles)}

    def __contains__(self, tile) -> bool:
        return tuple(tile) in self.tile_index

    def transpose(self) -> TileSet:
        """Tile set for the mirror image across the anti-diagonal (u<->l, d<->r)."""
        return TileSet(self.colors, tuple((l, r, u, d) for u, d, l, r in self.tiles))

    def to_json(self) -> dict:
        return {"colors": list(self.colors), "tiles": [list(t) for t in self.tiles]}

    @classmethod
    def from_json(cls, data: dict) -> TileSet:
        try:
            return cls(tuple(data["colors"]), tuple(tuple(t) for t in data["tiles"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed tile set: {exc}") from None


@dataclass(frozen=True)
class BTInstance:
    """An ``rows x cols`` bounded tiling problem with a total boundary condition.

    ``boundary["bottom"]``/``["top"]`` list one colour per column,
    ``boundary["left"]``/``["right"]`` one colour per row (row 0 first).
    """

    rows: int
    cols: int
    tileset: TileSet
    boundary: dict

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidInput(f"lattice must be at least 1x1, got {self.rows}x{self.cols}")
        if set(self.boundary) != set(SIDES):
            raise InvalidInput(f"boundary must specify exactly {SIDES}")
        frozen = {}
        for side in SIDES:
            want = self.cols if side in ("top", "bottom") else self.rows
            colors = tuple(self.boundary[side])
            if len(colors) != want:
                raise InvalidInput(f"{side} boundary needs {want} colours, got {len(colors)}")
            for c in colors:
                if c not in self.tileset.color_index:
                    raise InvalidInput(f"boundary colour {c!r} not in tile set")
            frozen[side] = colors
        object.__setattr__(self, "boundary", frozen)

    @property
    def cells(self) -> int:
        return self.rows * self.cols

    def __hash__(self):
        return hash((self.rows, self.cols, self.tileset, tuple(self.boundary[s] for s in SIDES)))

    def to_json(self) -> dict:
        out = self.tileset.to_json()
        out.update(rows=self.rows, cols=self.cols,
                   boundary={s: list(self.boundary[s]) for s in SIDES})
        return out

    @classmethod
    def from_json(cls, data: dict) -> BTInstance:
        try:
            return cls(int(data["rows"]), int(data["cols"]), TileSet.from_json(data),
                       dict(data["boundary"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed instance: {exc}") from None

    @classmethod
    def load(cls, path) -> BTInstance:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Tiling:
    """Tile indices, ``indices[r][c]`` for plaquette ``(r, c)``."""

    indices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(tuple(int(i) for i in row) for row in self.indices))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.indices), len(self.indices[0]) if self.indices else 0

    def render(self, tileset: TileSet) -> str:
        """Textual dump, top row first."""
        lines = []
        for r in reversed(range(len(self.indices))):
            lines.append(" | ".join(",".join(tileset.tiles[i]) for i in self.indices[r]))
        return "\n".join(lines)


def transpose_instance(inst: BTInstance) -> BTInstance:
    """Mirror across the main diagonal: plaquette (r, c) -> (c, r).

    A tile (u, d, l, r) becomes (r, l, d, u); tilings correspond one to one.
    """
    ts = inst.tileset
    tiles = tuple((r, l, d, u) for u, d, l, r in ts.tiles)
    b = inst.boundary
    return BTInstance(
        inst.cols, inst.rows, TileSet(ts.colors, tiles),
        {"top": b["right"], "right": b["top"], "bottom": b["left"], "left": b["bottom"]},
    )


def validate_tiling(inst: BTInstance, tiling: Tiling) -> bool:
    """Check every adjacency and boundary constraint of ``tiling``."""
    idx = tiling.indices
    if len(idx) != inst.rows or any(len(row) != inst.cols for row in idx):
        raise InvalidInput(f"tiling shape {tiling.shape} does not match {inst.rows}x{inst.cols}")
    tiles = inst.tileset.tiles
    if any(not 0 <= i < len(tiles) for row in idx for i in row):
        raise InvalidInput("tile index out of range")
    b = inst.boundary
    for r in range(inst.rows):
        for c in range(inst.cols):
            u, d, l, rt = tiles[idx[r][c]]
            if r == 0 and d != b["bottom"][c]:
                return False
            if r == inst.rows - 1 and u != b["top"][c]:
                return False
            if c == 0 and l != b["left"][r]:
                return False
            if c == inst.cols - 1 and rt != b["right"][r]:
                return False
            if r + 1 < inst.rows and u != tiles[idx[r + 1][c]][DOWN]:
                return False
            if c + 1 < inst.cols and rt != tiles[idx[r][c + 1]][LEFT]:
                return False
    return True


class _Search:
    """Row-major backtracking with forward checks against the placed neighbours."""

    def __init__(self, inst: BTInstance):
        self.inst = inst
        tiles = inst.tileset.tiles
        # candidates keyed by (required down colour, required left colour)
        self.by_dl: dict = defaultdict(list)
        for i, (u, d, l, r) in enumerate(tiles):
            self.by_dl[(d, l)].append(i)
        self.tiles = tiles

    def candidates(self, grid: list[list[int]], r: int, c: int) -> list[int]:
        inst, tiles = self.inst, self.tiles
        down = inst.boundary["bottom"][c] if r == 0 else tiles[grid[r - 1][c]][UP]
        left = inst.boundary["left"][r] if c == 0 else tiles[grid[r][c - 1]][RIGHT]
        out = self.by_dl.get((down, left), ())
        if r == inst.rows - 1:
            top = inst.boundary["top"][c]
            out = [i for i in out if tiles[i][UP] == top]
        if c == inst.cols - 1:
            right = inst.boundary["right"][r]
            out = [i for i in out if tiles[i][RIGHT] == right]
        return list(out)

    def first(self, fixed_first: int | None = None) -> Tiling | None:
        m, n = self.inst.rows, self.inst.cols
        grid = [[-1] * n for _ in range(m)]
        cells = [(r, c) for r in range(m) for c in range(n)]
        iters: list[Iterator[int]] = []

        def options(k):
            r, c = cells[k]
            opts = self.candidates(grid, r, c)
            if k == 0 and fixed_first is not None:
                opts = [i for i in opts if i == fixed_first]
            return iter(opts)

        iters.append(options(0))
        while iters:
            k = len(iters) - 1
            choice = next(iters[-1], None)
            r, c = cells[k]
            if choice is None:
                grid[r][c] = -1
                iters.pop()
                continue
            grid[r][c] = choice
            if k + 1 == len(cells):
                return Tiling(grid)
            iters.append(options(k + 1))
        return None


def _check_budget(inst: BTInstance, config: PipelineConfig) -> None:
    if inst.cells > config.max_cells:
        raise BudgetExceeded("exhaustive tiling search (plaquettes)", inst.cells, config.max_cells)


def _first_cell_options(inst: BTInstance) -> list[int]:
    return _Search(inst).candidates([[-1] * inst.cols for _ in range(inst.rows)], 0, 0)


def solve(inst: BTInstance, *, config: PipelineConfig = DEFAULT) -> Tiling | None:
    """First valid tiling in row-major, tile-index order, or ``None``."""
    _check_budget(inst, config)
    search = _Search(inst)
    if config.threads <= 1:
        return search.first()
    firsts = _first_cell_options(inst)
    with ThreadPoolExecutor(config.threads) as pool:
        results = list(pool.map(search.first, firsts))
    # canonical order, not completion order
    return next((t for t in results if t is not None), None)


def _count_dp(inst: BTInstance, fixed_first: int | None = None) -> int:
    """Transfer over rows, keyed by the ``u`` colours of the last completed row."""
    tiles = inst.tileset.tiles
    b = inst.boundary
    m, n = inst.rows, inst.cols
    by_dl = defaultdict(list)
    for i, (u, d, l, r) in enumerate(tiles):
        by_dl[(d, l)].append(i)

    profile = {tuple(b["bottom"]): 1}
    for r in range(m):
        new_profile: dict = defaultdict(int)
        for below, weight in profile.items():
            # extend the row left to right; partial rows keyed by (tops so far, right colour)
            partial = {((), b["left"][r]): weight}
            for c in range(n):
                nxt: dict = defaultdict(int)
                for (tops, right), w in partial.items():
                    for i in by_dl.get((below[c], right), ()):
                        if fixed_first is not None and r == 0 and c == 0 and i != fixed_first:
                            continue
                        u, _, _, rt = tiles[i]
                        nxt[(tops + (u,), rt)] += w
                partial = nxt
            for (tops, right), w in partial.items():
                if right == b["right"][r]:
                    new_profile[tops] += w
        profile = new_profile
    return sum(w for tops, w in profile.items() if tops == tuple(b["top"]))


def count(inst: BTInstance, *, config: PipelineConfig = DEFAULT) -> int:
    """Exact number of valid tilings (arbitrary-precision integer)."""
    _check_budget(inst, config)
    if config.threads <= 1:
        return _count_dp(inst)
    firsts = _first_cell_options(inst)
    with ThreadPoolExecutor(config.threads) as pool:
        parts = list(pool.map(lambda i: _count_dp(inst, i), firsts))
    return sum(parts)


def torus_count(ts: TileSet, lx: int, ly: int, *, config: PipelineConfig = DEFAULT) -> int:
    """Exact number of tilings of the ``lx`` (columns) by ``ly`` (rows) torus.

    Uses the row transfer matrix over tuples of vertical-link colours; its
    entries count periodic rows with given bottom and top colours.
    """
    if lx < 1 or ly < 1:
        raise InvalidInput(f"torus sides must be positive, got {lx}x{ly}")
    if lx * ly > config.max_cells:
        raise BudgetExceeded("torus tiling count (plaquettes)", lx * ly, config.max_cells)
    if not ts.tiles:
        return 0
    tiles = ts.tiles
    by_l = defaultdict(list)
    for i, t in enumerate(tiles):
        by_l[t[LEFT]].append(i)

    # transfer[bottom colours][top colours] = number of periodic rows
    transfer: dict = defaultdict(lambda: defaultdict(int))
    for first in range(len(tiles)):
        stack = [((first,), tiles[first][RIGHT])]
        while stack:
            seq, right = stack.pop()
            if len(seq) == lx:
                if right == tiles[seq[0]][LEFT]:
                    bottom = tuple(tiles[i][DOWN] for i in seq)
                    top = tuple(tiles[i][UP] for i in seq)
                    transfer[bottom][top] += 1
                continue
            for i in by_l.get(right, ()):
                stack.append((seq + (i,), tiles[i][RIGHT]))

    total = 0
    for start in sorted(transfer):
        vec = {start: 1}
        for _ in range(ly):
            nxt: dict = defaultdict(int)
            for key, w in vec.items():
                for top, t in transfer.get(key, {}).items():
                    nxt[top] += w * t
            vec = nxt
            if not vec:
                break
        total += vec.get(start, 0)
    return total


def load_tileset(path) -> TileSet:
    with open(path) as fh:
        return TileSet.from_json(json.load(fh))


def uniform_boundary(rows: int, cols: int, color: str) -> dict:
    return {"top": [color] * cols, "bottom": [color] * cols,
            "left": [color] * rows, "right": [color] * rows}


def boundary_of(rows: int, cols: int, tiles: Sequence[Sequence[Tile]]) -> dict:
    """Boundary colours read off a rows x cols array of tiles (row 0 bottom)."""
    return {
        "bottom": [tiles[0][c][DOWN] for c in range(cols)],
        "top": [tiles[rows - 1][c][UP] for c in range(cols)],
        "left": [tiles[r][0][LEFT] for r in range(rows)],
        "right": [tiles[r][cols - 1][RIGHT] for r in range(rows)],
    }
