import random
from fractions import Fraction

import pytest

from support import MONO, MONO_A, brute_energy, brute_ground_energy, corpus
from tilepeps.config import PipelineConfig
from tilepeps.errors import BudgetExceeded, InvalidInput
from tilepeps.hamiltonian import (HORIZONTAL, VERTICAL, boundary_term_energy,
                                  boundary_term_matrix, bulk_term_energy, bulk_term_matrix,
                                  clh_decide, config_from_tiling, ground_energy, is_diagonal,
                                  tiling_from_config, total_energy)
from tilepeps.tiling import BTInstance, TileSet, count, solve, uniform_boundary

AAAA, BBBB = ("a",) * 4, ("b",) * 4


def test_bulk_term_examples():
    assert bulk_term_energy(MONO, AAAA, AAAA, HORIZONTAL) == 0
    assert bulk_term_energy(MONO, AAAA, BBBB, HORIZONTAL) == 1
    assert bulk_term_energy(MONO_A, BBBB, BBBB, VERTICAL) == 1
    with pytest.raises(InvalidInput):
        bulk_term_energy(MONO, AAAA, AAAA, "diagonal")


def test_bulk_term_orientation_convention():
    ts = TileSet(("a", "b"), (("a", "a", "a", "b"), ("a", "a", "b", "b")))
    left, right = ts.tiles
    assert bulk_term_energy(ts, right, left, HORIZONTAL) == 0
    assert bulk_term_energy(ts, left, right, HORIZONTAL) == 1


def test_boundary_term_examples():
    assert boundary_term_energy(MONO, "top", "a", AAAA) == 0
    assert boundary_term_energy(MONO, "top", "b", AAAA) == 1
    with pytest.raises(InvalidInput):
        boundary_term_energy(MONO, "middle", "a", AAAA)


def test_deviant_corner():
    inst = BTInstance(2, 2, MONO_A, uniform_boundary(2, 2, "a"))
    cfg = [[BBBB, AAAA], [AAAA, AAAA]]
    assert total_energy(inst, cfg) == 4
    assert brute_energy(inst, cfg) == 4


def test_single_plaquette_zero():
    inst = BTInstance(1, 1, MONO_A, uniform_boundary(1, 1, "a"))
    assert ground_energy(inst) == 0
    assert clh_decide(inst) == "YES"


def test_empty_tileset_energy_counts_all_terms():
    inst = BTInstance(1, 1, TileSet(("a",), ()), uniform_boundary(1, 1, "a"))
    assert ground_energy(inst) == 4
    assert clh_decide(inst) == "NO"


def test_total_energy_matches_definition_on_random_configs():
    rng = random.Random(3)
    for inst in corpus()[:120]:
        for _ in range(10):
            cfg = [[tuple(rng.choice(inst.tileset.colors) for _ in range(4)) for _ in range(inst.cols)]
                   for _ in range(inst.rows)]
            if rng.random() < 0.5 and inst.tileset.tiles:
                cfg[0][0] = rng.choice(inst.tileset.tiles)
            assert total_energy(inst, cfg) == brute_energy(inst, cfg)


def test_ground_energy_matches_brute_force_on_tiny_instances():
    checked = 0
    for inst in corpus():
        if len(inst.tileset.colors) ** (4 * inst.cells) > 5000:
            continue
        assert ground_energy(inst) == brute_ground_energy(inst)
        checked += 1
    assert checked >= 30


def test_tiling_config_round_trip():
    for inst in corpus()[:60]:
        t = solve(inst)
        if t is None:
            continue
        cfg = config_from_tiling(inst, t)
        assert total_energy(inst, cfg) == 0
        assert tiling_from_config(inst, cfg) == t


def test_threads_and_transpose_agree():
    cfg = PipelineConfig(threads=3)
    for inst in corpus()[:80]:
        assert ground_energy(inst, config=cfg) == ground_energy(inst)


def test_energy_budget():
    inst = BTInstance(4, 4, MONO_A, uniform_boundary(4, 4, "a"))
    with pytest.raises(BudgetExceeded):
        ground_energy(inst)
    assert ground_energy(inst, config=PipelineConfig(max_energy_cells=16)) == 0


def test_clh_promise_checks():
    inst = BTInstance(1, 1, MONO_A, uniform_boundary(1, 1, "b"))
    assert clh_decide(inst) == "NO"
    with pytest.raises(InvalidInput):
        clh_decide(inst, Fraction(1, 3), Fraction(2, 3))
    one = BTInstance(1, 1, MONO_A, {"top": ["b"], "bottom": ["a"], "left": ["a"], "right": ["a"]})
    assert ground_energy(one) == 1
    with pytest.raises(InvalidInput):
        clh_decide(one, Fraction(3, 2), Fraction(1, 2))


def test_materialized_terms_are_diagonal():
    for ts in (MONO, MONO_A):
        assert is_diagonal(bulk_term_matrix(ts, HORIZONTAL))
        assert is_diagonal(bulk_term_matrix(ts, VERTICAL))
        assert is_diagonal(boundary_term_matrix(ts, "left", "a"))
    m = bulk_term_matrix(MONO, HORIZONTAL)
    assert m.shape == (256, 256)
    assert sorted(set(m.diagonal())) == [0.0, 1.0]
    assert m.diagonal().sum() == 256 - 2


def test_energy_zero_iff_solvable():
    for inst in corpus():
        assert (ground_energy(inst) == 0) == (count(inst) > 0)
