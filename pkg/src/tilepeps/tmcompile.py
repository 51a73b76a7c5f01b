"""Compile a Turing machine and an input word into a bounded tiling instance.

Each row of plaquettes advances the computation by one step: the colours on
the bottom links of a row spell one instantaneous description, the colours
on its top links the next one. Side links carry the new head state across
to the neighbouring column when the head moves, and are blank otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import InvalidInput
from .tiling import BTInstance, TileSet
from .turing import Move, TuringMachine, require_valid


@dataclass(frozen=True)
class Symbol:
    symbol: str

    def __str__(self):
        return f"s:{self.symbol}"


@dataclass(frozen=True)
class SymbolState:
    symbol: str
    state: str

    def __str__(self):
        return f"sq:{self.symbol},{self.state}"


@dataclass(frozen=True)
class State:
    state: str

    def __str__(self):
        return f"q:{self.state}"


@dataclass(frozen=True)
class Blank:
    def __str__(self):
        return "blank"


CompiledColor = Union[Symbol, SymbolState, State, Blank]
BLANK = Blank()


def parse_color(text: str) -> CompiledColor:
    if text == "blank":
        return BLANK
    kind, _, rest = text.partition(":")
    if kind == "s" and rest:
        return Symbol(rest)
    if kind == "q" and rest:
        return State(rest)
    if kind == "sq" and "," in rest:
        sym, state = rest.split(",", 1)
        return SymbolState(sym, state)
    raise InvalidInput(f"not a compiled colour: {text!r}")


def compiled_colors(tm: TuringMachine) -> list[CompiledColor]:
    out: list[CompiledColor] = [Symbol(s) for s in tm.alphabet]
    out += [SymbolState(s, q) for s in tm.alphabet for q in tm.states]
    out += [State(q) for q in tm.states]
    out.append(BLANK)
    return out


def _tile(u, d, l=BLANK, r=BLANK) -> tuple[str, str, str, str]:
    return (str(u), str(d), str(l), str(r))


def compile_tiles(tm: TuringMachine) -> TileSet:
    """Tile set simulating one computation step per row of plaquettes."""
    require_valid(tm)
    tiles = []
    # cells away from the head copy their symbol upwards
    for s in tm.alphabet:
        tiles.append(_tile(Symbol(s), Symbol(s)))
    for q in tm.program:
        head_in = SymbolState(q.read, q.state)
        if q.move is Move.STAY:
            tiles.append(_tile(SymbolState(q.write, q.next_state), head_in))
            continue
        carrier = State(q.next_state)
        if q.move is Move.LEFT:
            tiles.append(_tile(Symbol(q.write), head_in, l=carrier))
            # the cell on the left receives the head through its right side
            tiles += [_tile(SymbolState(s, q.next_state), Symbol(s), r=carrier) for s in tm.alphabet]
        else:
            tiles.append(_tile(Symbol(q.write), head_in, r=carrier))
            tiles += [_tile(SymbolState(s, q.next_state), Symbol(s), l=carrier) for s in tm.alphabet]
    # accepted configurations may idle until the top row
    accept = SymbolState(tm.blank, tm.accepting)
    tiles.append(_tile(accept, accept))
    tiles.append(_tile(BLANK, BLANK))
    unique = list(dict.fromkeys(tiles))
    return TileSet(tuple(str(c) for c in compiled_colors(tm)), tuple(unique))


def color_count(tm: TuringMachine) -> int:
    """``|Sigma| + |Sigma||K| + |K| + 1``, checked against the compiled palette."""
    require_valid(tm)
    k, sigma = len(tm.states), len(tm.alphabet)
    expected = sigma + sigma * k + k + 1
    actual = len(compile_tiles(tm).colors)
    assert actual == expected, (actual, expected)
    return expected


def compile_instance(tm: TuringMachine, word, rows: int, cols: int) -> BTInstance:
    """Bounded tiling instance whose solutions are accepting computations.

    Bottom links hold the initial ID (head on the leftmost input cell in
    state ``q0``), top links the accepting ID ``qF`` on a blank tape, and
    the side links are blank so the head cannot leave the ``cols`` cells.
    """
    symbols = tuple(word)
    for s in symbols:
        if s not in tm.alphabet or s == tm.blank:
            raise InvalidInput(f"input symbol {s!r} must be a non-blank alphabet symbol")
    if cols < len(symbols) + 1:
        raise InvalidInput(f"cols={cols} too small for word of length {len(symbols)} (need >= {len(symbols) + 1})")
    if rows < 2:
        raise InvalidInput(f"rows must be at least 2, got {rows}")
    ts = compile_tiles(tm)
    tape = list(symbols) + [tm.blank] * (cols - len(symbols))
    bottom = [str(SymbolState(tape[0], tm.initial))] + [str(Symbol(s)) for s in tape[1:]]
    top = [str(SymbolState(tm.blank, tm.accepting))] + [str(Symbol(tm.blank))] * (cols - 1)
    side = [str(BLANK)] * rows
    return BTInstance(rows, cols, ts, {"top": top, "bottom": bottom, "left": side, "right": side})
