"""Seeded instance corpus and brute-force oracles shared by the test modules.

The oracles here are deliberately naive and share no code with the library
beyond the data classes: full enumeration of tile or colour assignments.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product

from tilepeps.tiling import BTInstance, TileSet

SEED = 20261018
PALETTE = "abc"

MONO = TileSet(("a", "b"), (("a", "a", "a", "a"), ("b", "b", "b", "b")))
MONO_A = TileSet(("a", "b"), (("a", "a", "a", "a"),))
STRIPE = TileSet(("0", "1", "c"), (("0", "1", "c", "c"), ("1", "0", "c", "c")))


def _random_boundary(rng, rows, cols, colors):
    return {"top": [rng.choice(colors) for _ in range(cols)],
            "bottom": [rng.choice(colors) for _ in range(cols)],
            "left": [rng.choice(colors) for _ in range(rows)],
            "right": [rng.choice(colors) for _ in range(rows)]}


def _planted(rng, rows, cols, colors):
    """Random edge colouring; its tiles become (part of) T, its rim the boundary."""
    horiz = [[rng.choice(colors) for _ in range(cols + 1)] for _ in range(rows)]
    vert = [[rng.choice(colors) for _ in range(cols)] for _ in range(rows + 1)]
    grid = [[(vert[r + 1][c], vert[r][c], horiz[r][c], horiz[r][c + 1])
             for c in range(cols)] for r in range(rows)]
    tiles = list(dict.fromkeys(t for row in grid for t in row))
    boundary = {"top": vert[rows], "bottom": vert[0],
                "left": [horiz[r][0] for r in range(rows)],
                "right": [horiz[r][cols] for r in range(rows)]}
    return tiles, boundary


def _random_tiles(rng, colors, n):
    pool = list(product(colors, repeat=4))
    return rng.sample(pool, min(n, len(pool)))


@lru_cache(maxsize=None)
def corpus(size: int = 240) -> tuple[BTInstance, ...]:
    """Half random boundaries, half planted solvable ones; |Gamma| <= 3, |T| <= 6, up to 3x3."""
    rng = random.Random(SEED)
    out = []
    while len(out) < size:
        k = rng.randint(1, 3)
        colors = list(PALETTE[:k])
        rows, cols = rng.randint(1, 3), rng.randint(1, 3)
        if len(out) % 2:
            tiles, boundary = _planted(rng, rows, cols, colors)
            if len(tiles) > 6:
                continue
            extra = [t for t in _random_tiles(rng, colors, 6) if t not in tiles]
            tiles += extra[:rng.randint(0, 6 - len(tiles))]
        else:
            tiles = _random_tiles(rng, colors, rng.randint(0, 6))
            boundary = _random_boundary(rng, rows, cols, colors)
        rng.shuffle(tiles)
        out.append(BTInstance(rows, cols, TileSet(tuple(colors), tuple(tiles)), boundary))
    fixed = [BTInstance(2, 2, MONO, {"top": ["a", "a"], "bottom": ["b", "b"],
                                     "left": ["a", "a"], "right": ["a", "a"]}),
             BTInstance(2, 2, MONO_A, {s: ["a", "a"] for s in ("top", "bottom", "left", "right")}),
             BTInstance(2, 3, STRIPE, {"top": ["0"] * 3, "bottom": ["0"] * 3,
                                       "left": ["c", "c"], "right": ["c", "c"]})]
    return tuple(fixed + out)


def corpus_tilesets() -> list[TileSet]:
    return list(dict.fromkeys(inst.tileset for inst in corpus()))


# --- oracles ---------------------------------------------------------------

def valid(inst: BTInstance, grid) -> bool:
    """Plain-language check of one assignment of tile tuples (row 0 at the bottom)."""
    m, n, b = inst.rows, inst.cols, inst.boundary
    for r in range(m):
        for c in range(n):
            u, d, l, rt = grid[r][c]
            if r == 0 and d != b["bottom"][c]:
                return False
            if r == m - 1 and u != b["top"][c]:
                return False
            if c == 0 and l != b["left"][r]:
                return False
            if c == n - 1 and rt != b["right"][r]:
                return False
            if r + 1 < m and u != grid[r + 1][c][1]:
                return False
            if c + 1 < n and rt != grid[r][c + 1][2]:
                return False
    return True


def naive_count(inst: BTInstance) -> int:
    """Backtracking enumeration; each check is made as soon as both sides are placed."""
    m, n, b = inst.rows, inst.cols, inst.boundary
    grid = [[None] * n for _ in range(m)]

    def fits(r, c, t):
        u, d, l, rt = t
        return ((r > 0 or d == b["bottom"][c]) and (r < m - 1 or u == b["top"][c])
                and (c > 0 or l == b["left"][r]) and (c < n - 1 or rt == b["right"][r])
                and (r == 0 or grid[r - 1][c][0] == d) and (c == 0 or grid[r][c - 1][3] == l))

    def go(i):
        if i == m * n:
            assert valid(inst, grid)
            return 1
        r, c = divmod(i, n)
        total = 0
        for t in inst.tileset.tiles:
            if fits(r, c, t):
                grid[r][c] = t
                total += go(i + 1)
        grid[r][c] = None
        return total

    return go(0)


def naive_torus_count(ts: TileSet, lx: int, ly: int) -> int:
    """Backtracking enumeration of periodic tilings (every complete assignment is visited)."""
    tiles = ts.tiles
    grid = [[None] * lx for _ in range(ly)]

    def ok(r, c):
        t = grid[r][c]
        if c > 0 and grid[r][c - 1][3] != t[2]:
            return False
        if r > 0 and grid[r - 1][c][0] != t[1]:
            return False
        if c == lx - 1 and t[3] != grid[r][0][2]:
            return False
        if r == ly - 1 and t[0] != grid[0][c][1]:
            return False
        return True

    def go(i):
        if i == lx * ly:
            return 1
        r, c = divmod(i, lx)
        total = 0
        for t in tiles:
            grid[r][c] = t
            if ok(r, c):
                total += go(i + 1)
        grid[r][c] = None
        return total

    return go(0)


def brute_energy(inst: BTInstance, cfg) -> int:
    """Count violated terms directly from the definition of the Hamiltonian."""
    T = set(inst.tileset.tiles)
    m, n, b = inst.rows, inst.cols, inst.boundary
    e = 0
    for r in range(m):
        for c in range(n):
            p = cfg[r][c]
            if c + 1 < n:
                q = cfg[r][c + 1]
                e += not (p in T and q in T and p[3] == q[2])
            if r + 1 < m:
                q = cfg[r + 1][c]
                e += not (p in T and q in T and p[0] == q[1])
            for side, slot, edge in (("bottom", 1, r == 0), ("top", 0, r == m - 1),
                                     ("left", 2, c == 0), ("right", 3, c == n - 1)):
                if edge:
                    key = c if side in ("top", "bottom") else r
                    e += not (p in T and p[slot] == b[side][key])
    return e


def brute_ground_energy(inst: BTInstance) -> int:
    plaquettes = list(product(inst.tileset.colors, repeat=4))
    best = None
    for flat in product(plaquettes, repeat=inst.rows * inst.cols):
        cfg = [flat[r * inst.cols:(r + 1) * inst.cols] for r in range(inst.rows)]
        e = brute_energy(inst, cfg)
        best = e if best is None else min(best, e)
    return best


def brute_strict_accepts(tm, word, t: int, tape_bound: int) -> bool:
    """Breadth-first search over all ID sets reachable in <= t steps."""
    tape = tuple(word) or (tm.blank,)
    tape = tape + (tm.blank,) * (tape_bound - len(tape))
    if len(tape) > tape_bound:
        return False
    frontier = {(tape, 0, tm.initial)}

    def accepting(id_):
        tp, head, q = id_
        return q == tm.accepting and head == 0 and all(s == tm.blank for s in tp)

    for _ in range(t + 1):
        if any(accepting(x) for x in frontier):
            return True
        nxt = set()
        for tp, head, q in frontier:
            for row in tm.program:
                state, read, q2, write, move = (row.state, row.read, row.next_state,
                                                row.write, row.move.value)
                if state == q and read == tp[head] and 0 <= head + move < tape_bound:
                    nxt.add((tp[:head] + (write,) + tp[head + 1:], head + move, q2))
        frontier = nxt
    return False
