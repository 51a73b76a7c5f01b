"""Size budgets and tolerances for the exact routines."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .errors import InvalidInput

ENV_BUDGET_CELLS = "TILEPEPS_BUDGET_CELLS"
ENV_THREADS = "TILEPEPS_THREADS"


@dataclass(frozen=True)
class PipelineConfig:
    """Budgets and tolerances used by every exact operation.

    ``max_cells`` bounds exhaustive search (solve/count), ``max_energy_cells``
    bounds exact energy minimization, ``max_boundary_support`` bounds the
    number of stored entries of a contraction boundary, and
    ``max_operator_dim`` bounds the dimension of materialized operators.
    ``max_dense_entries`` caps dense operator output; tensors larger than
    ``max_dense_tensor_entries`` are serialized as nonzero lists.
    """

    max_cells: int = 100
    max_energy_cells: int = 12
    max_boundary_support: int = 4**6
    max_operator_dim: int = 4**8
    max_dense_entries: int = 1 << 20
    max_dense_tensor_entries: int = 1 << 13
    rank_tol: float = 1e-10
    float_zero_tol: float = 1e-20
    threads: int = 1

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name.endswith("_tol"):
                if not 0.0 < value < 1e-3:
                    raise InvalidInput(f"{f.name} must lie in (0, 1e-3), got {value}")
            elif value <= 0:
                raise InvalidInput(f"{f.name} must be positive, got {value}")

    @classmethod
    def from_env(cls, **overrides) -> PipelineConfig:
        env = {}
        if os.environ.get(ENV_BUDGET_CELLS):
            env["max_cells"] = _env_int(ENV_BUDGET_CELLS)
        if os.environ.get(ENV_THREADS):
            env["threads"] = _env_int(ENV_THREADS)
        env.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**env)

    def with_(self, **changes) -> PipelineConfig:
        return replace(self, **changes)


def _env_int(name: str) -> int:
    raw = os.environ[name]
    try:
        return int(raw)
    except ValueError:
        raise InvalidInput(f"{name} must be an integer, got {raw!r}") from None


DEFAULT = PipelineConfig()
