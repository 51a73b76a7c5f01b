import pytest

from tilepeps.errors import InvalidInput
from tilepeps.tiling import solve
from tilepeps.tmcompile import (BLANK, State, Symbol, SymbolState, color_count, compile_instance,
                                compile_tiles, parse_color)
from tilepeps.turing import (TuringMachine, accepts_within, eraser_machine,
                             immediate_accept_machine, wandering_eraser_machine)

MACHINES = [immediate_accept_machine, eraser_machine, wandering_eraser_machine]


def big_machine(k=5, sigma=7):
    states = [f"q{i}" for i in range(k)]
    alphabet = ["#"] + [str(i) for i in range(1, sigma)]
    program = [(q, s, states[(i + 1) % k], s, "R") for i, q in enumerate(states) for s in alphabet]
    return TuringMachine(states, alphabet, "q0", states[-1], program)


def test_color_count_formula():
    assert color_count(big_machine()) == 48
    assert color_count(TuringMachine(("q",), ("#",), "q", "q", ())) == 4
    for f in MACHINES:
        assert color_count(f()) == 9


def test_color_strings_round_trip():
    for c in (Symbol("1"), SymbolState("#", "q0"), State("qF"), BLANK):
        assert parse_color(str(c)) == c
    assert str(SymbolState("1", "q0")) == "sq:1,q0"
    with pytest.raises(InvalidInput):
        parse_color("z:1")


def test_stay_tile_present():
    ts = compile_tiles(immediate_accept_machine())
    assert ("sq:#,qF", "sq:#,q0", "blank", "blank") in ts


def test_right_move_head_and_receivers():
    ts = compile_tiles(eraser_machine())
    assert ("s:#", "sq:1,q0", "blank", "q:q0") in ts
    for s in ("#", "1"):
        assert (f"sq:{s},q0", f"s:{s}", "q:q0", "blank") in ts


def test_left_move_head_and_receivers():
    ts = compile_tiles(wandering_eraser_machine())
    assert ("s:#", "sq:#,q0", "q:q0", "blank") in ts
    assert ("sq:1,q0", "s:1", "blank", "q:q0") in ts


def test_lattice_arithmetic():
    inst = compile_instance(eraser_machine(), "11", 4, 5)
    assert inst.cells == 20
    assert sum(len(v) for v in inst.boundary.values()) == 2 * (4 + 5)
    assert inst.boundary["bottom"] == ("sq:1,q0", "s:1", "s:#", "s:#", "s:#")
    assert inst.boundary["top"] == ("sq:#,qF",) + ("s:#",) * 4


def test_size_errors():
    with pytest.raises(InvalidInput):
        compile_instance(eraser_machine(), "11", 4, 2)
    with pytest.raises(InvalidInput):
        compile_instance(eraser_machine(), "1", 1, 2)


def test_eraser_instances_unsolvable():
    # the eraser leaves its head at the right end, so it never strict-halts on "1"
    assert solve(compile_instance(eraser_machine(), "1", 3, 2)) is None
    assert solve(compile_instance(eraser_machine(), "1", 2, 2)) is None


def test_one_row_per_step_equivalence():
    for f in MACHINES:
        tm = f()
        for w in ("", "1", "11", "111"):
            for h in range(2, 7):
                for l in range(len(w) + 1, 6):
                    got = solve(compile_instance(tm, w, h, l)) is not None
                    assert got == bool(accepts_within(tm, w, h, l, strict_halt=True)), (f.__name__, w, h, l)


def test_solution_rows_spell_the_computation():
    tm = wandering_eraser_machine()
    inst = compile_instance(tm, "1", 3, 2)
    tiling = solve(inst)
    assert tiling is not None
    tiles = inst.tileset.tiles
    bottoms = [[tiles[i][1] for i in row] for row in tiling.indices]
    assert bottoms[0] == ["sq:1,q0", "s:#"]
