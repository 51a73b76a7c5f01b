import json
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from support import MONO, MONO_A, STRIPE, corpus, naive_count, naive_torus_count
from tilepeps.config import PipelineConfig
from tilepeps.errors import BudgetExceeded, InvalidInput
from tilepeps.hamiltonian import encode_plaquette
from tilepeps.tensor import (PepsGrid, Tensor, amplitudes, assemble_peps, boundary_tensor,
                             bulk_tensor, direct_sum, norm_squared, random_tensor, tensor_product,
                             torus_grid, zero_test_open, zero_test_torus)
from tilepeps.tiling import BTInstance, TileSet, solve, uniform_boundary
from tilepeps.tmcompile import compile_instance
from tilepeps.turing import wandering_eraser_machine

A_ONLY = TileSet(("a",), (("a", "a", "a", "a"),))


def test_bulk_tensor_examples():
    t = bulk_tensor(A_ONLY)
    assert t.shape == (1, 1, 1, 1, 1) and t.nnz == 1 and t.values.tolist() == [1]
    assert bulk_tensor(TileSet(("a", "b"), ())).nnz == 0
    t = bulk_tensor(MONO_A)
    assert t.shape == (2, 2, 2, 2, 16) and t.nnz == 1


def test_bulk_tensor_entries_follow_tiles():
    ts = corpus()[10].tileset
    t = bulk_tensor(ts)
    dense = t.to_dense()
    for w in ts.tiles:
        u, d, l, r = (ts.color_index[x] for x in w)
        assert dense[u, d, l, r, encode_plaquette(ts, w)] == 1
    assert t.nnz == len(ts.tiles)


def test_boundary_tensor_examples():
    t = boundary_tensor(MONO, {"up": "a"})
    assert t.legs == ("down", "left", "right", "phys") and t.nnz == 1
    assert boundary_tensor(MONO_A, {"up": "b"}).nnz == 0
    t = boundary_tensor(MONO, {"up": "a", "left": "a"})
    assert t.legs == ("down", "right", "phys") and t.values.tolist() == [1]


def test_assemble_shapes():
    g = assemble_peps(BTInstance(1, 1, A_ONLY, uniform_boundary(1, 1, "a")))
    assert g.sites[0][0].legs == ("phys",)
    g = assemble_peps(BTInstance(2, 2, MONO, uniform_boundary(2, 2, "a")))
    assert all(len(t.legs) == 3 for row in g.sites for t in row)
    inst = compile_instance(wandering_eraser_machine(), "11", 6, 5)
    g = assemble_peps(inst)
    assert (g.rows, g.cols) == (6, 5)


def test_norm_examples():
    assert norm_squared(assemble_peps(BTInstance(2, 2, MONO, uniform_boundary(2, 2, "a")))) == 1
    empty = BTInstance(2, 2, TileSet(("a",), ()), uniform_boundary(2, 2, "a"))
    assert norm_squared(assemble_peps(empty)) == 0
    assert zero_test_open(assemble_peps(empty))
    assert not zero_test_open(assemble_peps(BTInstance(2, 2, MONO_A, uniform_boundary(2, 2, "a"))))


def test_norm_equals_count_both_orders():
    for inst in corpus():
        g = assemble_peps(inst)
        n = naive_count(inst)
        assert norm_squared(g) == n
        assert norm_squared(g, order="columns") == n


def test_norm_is_python_int_in_exact_mode():
    inst = BTInstance(3, 3, MONO, uniform_boundary(3, 3, "a"))
    assert type(norm_squared(assemble_peps(inst))) is int


def test_float_mode_agrees_with_exact():
    for inst in corpus()[:80]:
        g = assemble_peps(inst)
        gf = PepsGrid([[t.as_float() for t in row] for row in g.sites])
        assert gf.mode == "float"
        assert zero_test_open(gf) == zero_test_open(g)
        assert norm_squared(gf) == pytest.approx(norm_squared(g))


def test_amplitudes_are_tilings():
    for inst in corpus()[:60]:
        amps = amplitudes(assemble_peps(inst))
        assert set(amps.values()) <= {1}
        assert len(amps) == naive_count(inst)


def test_compiled_instance_zero_test_matches_solver():
    tm = wandering_eraser_machine()
    for w in ("", "1", "11"):
        for h in (2, 3, 5, 6):
            inst = compile_instance(tm, w, h, len(w) + 1)
            assert zero_test_open(assemble_peps(inst)) == (solve(inst) is None)


def test_torus_examples():
    for lx, ly in ((1, 1), (2, 2), (3, 2)):
        assert not zero_test_torus(MONO, lx, ly)
    assert zero_test_torus(STRIPE, 2, 3)
    assert not zero_test_torus(STRIPE, 2, 2)
    assert zero_test_torus(TileSet(("a",), ()), 2, 2)
    assert not zero_test_torus(STRIPE, 9, 2)  # wide tori sweep the short way
    assert zero_test_torus(STRIPE, 9, 1)


def test_torus_norm_equals_enumeration():
    for ts in (MONO, STRIPE) + tuple(dict.fromkeys(i.tileset for i in corpus()[:30])):
        for lx, ly in ((1, 1), (2, 1), (1, 3), (2, 2), (3, 2), (2, 3)):
            assert norm_squared(torus_grid(bulk_tensor(ts), lx, ly)) == naive_torus_count(ts, lx, ly)


def test_contraction_budget_refusal():
    full = TileSet(("a", "b"), tuple(product("ab", repeat=4)))
    inst = BTInstance(3, 3, full, uniform_boundary(3, 3, "a"))
    with pytest.raises(BudgetExceeded):
        norm_squared(assemble_peps(inst), config=PipelineConfig(max_boundary_support=1))


def test_direct_sum_and_product_dims():
    z1 = Tensor(("up", "down", "left", "right", "phys"), (1, 2, 1, 2, 3), np.zeros((0, 5)), [])
    z2 = Tensor(("up", "down", "left", "right", "phys"), (2, 1, 2, 1, 1), np.zeros((0, 5)), [])
    s = direct_sum(z1, z2)
    assert s.shape == (3, 3, 3, 3, 4) and s.nnz == 0
    rng = np.random.default_rng(1)
    a = random_tensor(rng, dict(up=2, down=2, left=2, right=2), 3)
    b = random_tensor(rng, dict(up=2, down=2, left=2, right=2), 16)
    assert tensor_product(a, b).shape == (4, 4, 4, 4, 48)
    with pytest.raises(InvalidInput):
        direct_sum(a, Tensor(("up", "phys"), (1, 1), [[0, 0]], [1]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_product_matches_numpy_kron(seed):
    rng = np.random.default_rng(seed)
    a = random_tensor(rng, dict(up=2, left=1), 2, density=0.7)
    b = random_tensor(rng, dict(up=1, left=2), 3, density=0.7)
    dense = np.einsum("ijk,lmn->iljmkn", a.to_dense(), b.to_dense()).reshape(2, 2, 6)
    assert np.allclose(tensor_product(a, b).to_dense(), dense)
    s = direct_sum(a, b).to_dense()
    assert np.allclose(s[:2, :1, :2], a.to_dense()) and np.allclose(s[2:, 1:, 2:], b.to_dense())
    assert not s[:2, 1:].any() and not s[2:, :1].any()


def test_tensor_canonicalises():
    t = Tensor(("phys", "up"), (2, 3), [[1, 2], [1, 2], [0, 0]], [2, -2, 5])
    assert t.legs == ("up", "phys")
    assert t.coords.tolist() == [[0, 0]] and t.values.tolist() == [5]
    with pytest.raises(InvalidInput):
        Tensor(("up",), (2,), [[2]], [1])
    with pytest.raises(InvalidInput):
        Tensor(("north",), (2,), [[0]], [1])


def test_json_round_trip_dense_and_sparse(tmp_path):
    g = assemble_peps(corpus()[7])
    again = PepsGrid.from_json(json.loads(json.dumps(g.to_json())))
    assert norm_squared(again) == norm_squared(g)
    sparse = g.to_json(max_dense_entries=1)
    assert all("nonzeros" in t for row in sparse["tensors"] for t in row)
    p = tmp_path / "g.json"
    p.write_text(json.dumps(sparse))
    assert norm_squared(PepsGrid.load(p)) == norm_squared(g)
    t = bulk_tensor(MONO)
    assert set(t.to_json()) == {"legs", "mode", "entries"}
    assert Tensor.from_json(t.to_json()).values.tolist() == t.values.tolist()


def test_grid_validation():
    a = bulk_tensor(MONO)
    with pytest.raises(InvalidInput):
        PepsGrid([[a]])  # open legs of dimension 2 on the rim
    with pytest.raises(InvalidInput):
        PepsGrid([[bulk_tensor(A_ONLY), bulk_tensor(A_ONLY).as_float()]])
