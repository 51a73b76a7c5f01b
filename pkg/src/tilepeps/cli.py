"""Command-line entry point.

Every subcommand prints a final ``RESULT: <value>`` line. Exit status is 0
for a decisive answer, 1 for malformed input or usage errors, and 2 when a
size budget refuses the computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .config import DEFAULT, PipelineConfig
from .errors import BudgetExceeded, TilepepsError
from .hamiltonian import (ALPHA, BETA, HORIZONTAL, VERTICAL, clh_decide, ground_energy,
                          load_config, total_energy)
from .parent import (OperatorMatrix, Region, check_parent_property, dominates,
                     hT_pair_operator, parent_term)
from .tensor import PepsGrid, assemble_peps, bulk_tensor, zero_test_open, zero_test_torus
from .tiling import BTInstance, count, load_tileset, solve, torus_count
from .tmcompile import compile_instance
from .turing import TuringMachine, accepts_within


@dataclass(frozen=True)
class PipelineReport:
    accepts: bool
    solvable: bool
    energy: int
    nonzero: bool

    @property
    def verdicts(self) -> tuple[bool, bool, bool, bool]:
        return (self.accepts, self.solvable, self.energy == 0, self.nonzero)

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1

    @property
    def summary(self) -> str:
        if not self.agree:
            return "disagree"
        return "agree: positive" if self.accepts else "agree: negative"


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except BudgetExceeded as exc:
        raise BudgetExceeded(f"{name} stage, {exc.what}", exc.size, exc.budget) from None


def pipeline_verify(tm: TuringMachine, word, h: int, l: int, *,
                    config: PipelineConfig = DEFAULT) -> PipelineReport:
    """Run all four deciders on one compiled instance (``h`` rows, ``l`` columns).

    The TM side allows ``h`` steps, one per row of plaquettes.
    """
    inst = compile_instance(tm, word, h, l)
    accepted = _stage("accepts_within", accepts_within, tm, word, h, l, strict_halt=True)
    tiling = _stage("solve", solve, inst, config=config)
    energy = _stage("ground_energy", ground_energy, inst, config=config)
    zero = _stage("zero_test", zero_test_open, assemble_peps(inst), config=config)
    return PipelineReport(bool(accepted), tiling is not None, energy, not zero)


# --- argument parsing ------------------------------------------------------

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _write_json(path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh)
        fh.write("\n")


def _instance(args) -> BTInstance:
    return BTInstance.load(args.instance)


def _orientation(args) -> Region:
    return Region.pair(args.orientation)


def _yes_no(flag: bool) -> str:
    return "true" if flag else "false"


def cmd_compile_tm(args, config):
    tm = TuringMachine.load(args.machine)
    inst = compile_instance(tm, args.word, args.rows, args.cols)
    if args.out:
        _write_json(args.out, inst.to_json())
    print(f"colors: {len(inst.tileset.colors)}")
    print(f"tiles: {len(inst.tileset.tiles)}")
    return f"{inst.rows}x{inst.cols}"


def cmd_solve(args, config):
    inst = _instance(args)
    tiling = solve(inst, config=config)
    if tiling is None:
        return "unsolvable"
    print(tiling.render(inst.tileset))
    return "solvable"


def cmd_count(args, config):
    return count(_instance(args), config=config)


def cmd_torus_count(args, config):
    return torus_count(load_tileset(args.tileset), args.lx, args.ly, config=config)


def cmd_energy(args, config):
    return total_energy(_instance(args), load_config(args.config))


def cmd_ground_energy(args, config):
    return ground_energy(_instance(args), config=config)


def cmd_clh(args, config):
    return clh_decide(_instance(args), Fraction(args.alpha), Fraction(args.beta), config=config)


def cmd_build_peps(args, config):
    grid = assemble_peps(_instance(args))
    if args.mode == "float":
        grid = PepsGrid([[t.as_float() for t in row] for row in grid.sites])
    _write_json(args.out, grid.to_json(config.max_dense_tensor_entries))
    return f"{grid.rows}x{grid.cols} {grid.mode}"


def cmd_zero_test(args, config):
    return "zero" if zero_test_open(PepsGrid.load(args.grid), config=config) else "nonzero"


def cmd_zero_test_torus(args, config):
    ts = load_tileset(args.tileset)
    return "zero" if zero_test_torus(ts, args.lx, args.ly, config=config) else "nonzero"


def cmd_parent_term(args, config):
    ts = load_tileset(args.tileset)
    h = parent_term(bulk_tensor(ts), _orientation(args), config=config)
    if args.out:
        _write_json(args.out, h.to_json(config.max_dense_entries))
    rank = round(float(h.matrix.diagonal().sum()))
    return f"dim={h.dim} rank={rank}"


def cmd_check_parent(args, config):
    ts = load_tileset(args.tileset)
    A, pair = bulk_tensor(ts), _orientation(args)
    if args.h:
        return _yes_no(check_parent_property(OperatorMatrix.load(args.h), A, pair, config=config))
    h = parent_term(A, pair, config=config)
    ok = (h.idempotence_defect() < 1e-10
          and check_parent_property(h, A, pair, config=config)
          and dominates(h, hT_pair_operator(ts, args.orientation)))
    return _yes_no(ok)


def cmd_dominates(args, config):
    return _yes_no(dominates(OperatorMatrix.load(args.h1), OperatorMatrix.load(args.h2)))


def cmd_verify_pipeline(args, config):
    tm = TuringMachine.load(args.machine)
    report = pipeline_verify(tm, args.word, args.h, args.l, config=config)
    print(f"accepts_within: {_yes_no(report.accepts)}")
    print(f"solve: {'solvable' if report.solvable else 'unsolvable'}")
    print(f"ground_energy: {report.energy}")
    print(f"zero_test: {'nonzero' if report.nonzero else 'zero'}")
    return report.summary


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, help="worker threads (default 1)")
    common.add_argument("--max-cells", type=int, help="cell budget for solve/count/torus-count")
    common.add_argument("--max-energy-cells", type=int, help="plaquette budget for energy minimization")
    common.add_argument("--max-support", type=int, dest="max_boundary_support",
                        help="stored-entry budget of a contraction boundary")
    common.add_argument("--max-operator-dim", type=int, help="dimension budget for operators")
    common.add_argument("--rank-tol", type=float, help="relative singular-value cutoff")

    parser = _Parser(prog="tilepeps", description="Tiling, commuting Hamiltonians and PEPS zero testing.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("compile-tm", cmd_compile_tm, "compile a TM and word into a tiling instance")
    p.add_argument("--machine", required=True)
    p.add_argument("--word", default="")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--out")

    for name, fn, text in (("solve", cmd_solve, "find a tiling"),
                           ("count", cmd_count, "count tilings exactly"),
                           ("ground-energy", cmd_ground_energy, "exact ground energy")):
        add(name, fn, text).add_argument("--instance", required=True)

    p = add("torus-count", cmd_torus_count, "count periodic tilings")
    p.add_argument("--tileset", required=True)
    p.add_argument("--lx", type=int, required=True)
    p.add_argument("--ly", type=int, required=True)

    p = add("energy", cmd_energy, "energy of a plaquette configuration")
    p.add_argument("--instance", required=True)
    p.add_argument("--config", required=True)

    p = add("clh", cmd_clh, "decide the commuting-Hamiltonian promise problem")
    p.add_argument("--instance", required=True)
    p.add_argument("--alpha", default=str(ALPHA))
    p.add_argument("--beta", default=str(BETA))

    p = add("build-peps", cmd_build_peps, "write the PEPS of an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")

    add("zero-test", cmd_zero_test, "decide whether an open PEPS is zero").add_argument(
        "--grid", required=True)

    p = add("zero-test-torus", cmd_zero_test_torus, "zero test of the periodic tile PEPS")
    p.add_argument("--tileset", required=True)
    p.add_argument("--lx", type=int, required=True)
    p.add_argument("--ly", type=int, required=True)

    for name, fn, text in (("parent-term", cmd_parent_term, "projector parent term on a pair"),
                           ("check-parent", cmd_check_parent, "verify the parent property")):
        p = add(name, fn, text)
        p.add_argument("--tileset", required=True)
        p.add_argument("--orientation", choices=(HORIZONTAL, VERTICAL), default=HORIZONTAL)
        if name == "parent-term":
            p.add_argument("--out")
        else:
            p.add_argument("--h", help="operator JSON to check instead of the projector")

    p = add("dominates", cmd_dominates, "test h1 >= h2")
    p.add_argument("--h1", required=True)
    p.add_argument("--h2", required=True)

    p = add("verify-pipeline", cmd_verify_pipeline, "cross-check all four deciders")
    p.add_argument("--machine", required=True)
    p.add_argument("--word", default="")
    p.add_argument("--h", "--rows", dest="h", type=int, required=True)
    p.add_argument("--l", "--cols", dest="l", type=int, required=True)
    return parser


_CONFIG_FLAGS = ("threads", "max_cells", "max_energy_cells", "max_boundary_support",
                 "max_operator_dim", "rank_tol")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("RESULT: error")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        config = PipelineConfig.from_env(**{k: getattr(args, k) for k in _CONFIG_FLAGS})
        result = args.func(args, config)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        print("RESULT: refused")
        return 2
    except (TilepepsError, OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("RESULT: error")
        return 1
    print(f"RESULT: {result}")
    return 0


def main() -> None:
    sys.exit(run())
