"""Bounded tilings, commuting Hamiltonians and PEPS zero testing, with exact oracles."""

from .config import DEFAULT, PipelineConfig
from .errors import BudgetExceeded, InvalidInput, TilepepsError
from .hamiltonian import clh_decide, ground_energy, total_energy
from .parent import (OperatorMatrix, Region, check_image_decomposition, check_parent_property,
                     chi_matrix, compose_gap_term, dominates, image_basis, parent_term)
from .tensor import (PepsGrid, Tensor, assemble_peps, direct_sum, norm_squared, tensor_product,
                     zero_test_open, zero_test_torus)
from .tiling import BTInstance, TileSet, Tiling, count, solve, torus_count
from .tmcompile import color_count, compile_instance, compile_tiles
from .turing import TuringMachine, accepts_within, step

__all__ = [
    "DEFAULT", "PipelineConfig", "BudgetExceeded", "InvalidInput", "TilepepsError",
    "clh_decide", "ground_energy", "total_energy",
    "OperatorMatrix", "Region", "check_image_decomposition", "check_parent_property",
    "chi_matrix", "compose_gap_term", "dominates", "image_basis", "parent_term",
    "PepsGrid", "Tensor", "assemble_peps", "direct_sum", "norm_squared", "tensor_product",
    "zero_test_open", "zero_test_torus",
    "BTInstance", "TileSet", "Tiling", "count", "solve", "torus_count",
    "color_count", "compile_instance", "compile_tiles",
    "TuringMachine", "accepts_within", "step",
]
__version__ = "0.1.0"
