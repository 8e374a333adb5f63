"""Command-line surface: state-file I/O and CSV report emission.

Subcommands: gen, measure, fuzz, thm2, sandwich.  Exit codes are stable:
0 pass, 1 check failure, 2 usage or input error.  Every CSV starts with a
column header row followed by a comment row echoing the run configuration,
and every randomized path is seeded, so re-running a command reproduces the
output (the wall-clock seconds column of `measure` is the one exception).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, axioms, measures, states
from .config import DEFAULT_CHECKS, CheckTolerances
from .qmat import DensityMatrix

ENV_OUT_DIR = "ENTBOUNDS_OUT"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    budget: int | None = None
    tol_exact: float = DEFAULT_CHECKS.exact
    tol_fw: float = DEFAULT_CHECKS.fw_value
    tol_opt: float = DEFAULT_CHECKS.opt_vs_opt
    out_dir: str = "."

    def checks(self) -> CheckTolerances:
        return CheckTolerances(exact=self.tol_exact, fw_value=self.tol_fw,
                               opt_vs_opt=self.tol_opt,
                               separable_exact=self.tol_exact)

    def echo(self) -> str:
        budget = "default" if self.budget is None else str(self.budget)
        return (f"seed={self.seed} budget={budget} tol_exact={self.tol_exact:g} "
                f"tol_fw={self.tol_fw:g} tol_opt={self.tol_opt:g} "
                f"version={__version__}")


class InputError(Exception):
    """Usage or input problem; maps to exit code 2."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_state_file(path: str, rho: DensityMatrix, metadata: dict) -> None:
    """JSON state file with floats at 17 significant digits, which is enough
    for exact 64-bit round trips (and hence byte-identical rewrites)."""
    lines = ["{",
             f'  "dims": [{rho.dim_a}, {rho.dim_b}],',
             f'  "metadata": {json.dumps(metadata, sort_keys=True)},',
             '  "matrix": [']
    for i, row in enumerate(rho.mat):
        cells = ", ".join(f"[{_fmt(c.real)}, {_fmt(c.imag)}]" for c in row)
        tail = "," if i < rho.dim - 1 else ""
        lines.append(f"    [{cells}]{tail}")
    lines += ["  ]", "}", ""]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))


def read_state_file(path: str) -> tuple[DensityMatrix, dict]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} "
                         f"column {exc.colno}: {exc.msg}") from exc
    for key in ("dims", "matrix"):
        if key not in doc:
            raise InputError(f"{path}: missing field {key!r}")
    dims = doc["dims"]
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise InputError(f"{path}: field 'dims' must be two positive integers, "
                         f"got {dims!r}")
    dim = dims[0] * dims[1]
    raw = doc["matrix"]
    if not isinstance(raw, list) or len(raw) != dim:
        raise InputError(f"{path}: field 'matrix' must have {dim} rows")
    mat = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise InputError(f"{path}: matrix[{i}] must have {dim} entries")
        for j, cell in enumerate(row):
            if not isinstance(cell, list) or len(cell) != 2:
                raise InputError(f"{path}: matrix[{i}][{j}] must be a "
                                 "[re, im] pair")
            mat[i, j] = complex(float(cell[0]), float(cell[1]))
    try:
        rho = DensityMatrix(dims[0], dims[1], mat)
    except ValueError as exc:
        raise InputError(f"{path}: not a valid density matrix: {exc}") from exc
    return rho, doc.get("metadata", {})


def _emit_csv(out_path: str | None, columns: list[str], rows: list[list],
              config: RunConfig, comments: list[str] = ()) -> None:
    def cell(v):
        if isinstance(v, float):
            return _fmt(v)
        return str(v)

    lines = [",".join(columns), f"# {config.echo()}"]
    lines += [f"# {c}" for c in comments]
    lines += [",".join(cell(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)


def _resolve_out(config: RunConfig, out: str | None) -> str | None:
    if out is None:
        return None
    if os.path.isabs(out):
        return out
    return os.path.join(config.out_dir, out)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

GEN_FAMILIES = ("max_entangled", "isotropic", "bell_diagonal", "random_pure",
                "random_density", "random_separable", "tiles")


def cmd_gen(args, config: RunConfig) -> int:
    family = args.family
    seed = config.seed
    if family == "max_entangled":
        rho = states.maximally_entangled(_need(args, "d")).projector()
        params = {"d": args.d}
    elif family == "isotropic":
        rho = states.isotropic(_need(args, "fidelity"), _need(args, "d"))
        params = {"fidelity": args.fidelity, "d": args.d}
    elif family == "bell_diagonal":
        probs = _need(args, "probs")
        rho = states.bell_diagonal(states.BellDiagonalParams(tuple(probs)))
        params = {"probs": probs}
    elif family == "random_pure":
        da, db = _need(args, "dims")
        rho = states.random_pure(da, db, seed).projector()
        params = {"dims": [da, db]}
    elif family == "random_density":
        da, db = _need(args, "dims")
        rho = states.random_density(da, db, _need(args, "rank"), seed)
        params = {"dims": [da, db], "rank": args.rank}
    elif family == "random_separable":
        da, db = _need(args, "dims")
        rho = states.random_separable(da, db, _need(args, "terms"), seed)
        params = {"dims": [da, db], "terms": args.terms}
    elif family == "tiles":
        rho = states.tiles_bound_entangled()
        params = {}
    else:
        raise InputError(f"unknown family {family!r}; known: {GEN_FAMILIES}")
    metadata = {"name": family, "generator": json.dumps(params, sort_keys=True),
                "seed": seed}
    out = _resolve_out(config, args.out)
    if out is None:
        raise InputError("gen requires --out")
    write_state_file(out, rho, metadata)
    return 0


def _need(args, attr):
    value = getattr(args, attr, None)
    if value is None:
        raise InputError(f"family {args.family!r} requires --{attr.replace('_', '-')}")
    return value


def cmd_measure(args, config: RunConfig) -> int:
    rho, _ = read_state_file(args.state)
    reg = measures.registry()
    if args.measures == ["all"]:
        entries = [e for e in reg if e.accepts(rho)]
    else:
        entries = []
        for name in args.measures:
            try:
                entry = measures.get_entry(name)
            except KeyError as exc:
                raise InputError(str(exc)) from exc
            if not entry.accepts(rho):
                raise InputError(f"measure {name!r} does not apply to a "
                                 f"({rho.dim_a} x {rho.dim_b}) state of purity "
                                 f"{rho.purity():.6f}")
            entries.append(entry)
    rows = []
    for entry in entries:
        start = time.perf_counter()
        result = entry.evaluate(rho, budget=config.budget, seed=config.seed)
        rows.append([entry.name, result.value, result.kind, result.gap,
                     result.iterations, f"{time.perf_counter() - start:.6f}"])
    _emit_csv(_resolve_out(config, args.out),
              ["measure", "value", "kind", "gap", "iterations", "seconds"],
              rows, config)
    return 0


def _subadditivity_bases(count: int, seed: int) -> list[DensityMatrix]:
    bases = [states.isotropic(f, 2) for f in (0.6, 0.75, 0.9)]
    bases.append(states.random_separable(2, 2, 3, seed))
    while len(bases) < count:
        bases.append(states.random_density(2, 2, 2 + len(bases) % 3, seed + len(bases)))
    return bases[:count]


def cmd_fuzz(args, config: RunConfig) -> int:
    try:
        entry = measures.get_entry(args.measure)
        check = axioms.get_check(args.check)
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    checks = config.checks()
    common = dict(seed=config.seed, budget=config.budget, checks=checks)
    try:
        if args.check == "normalization":
            report = check(entry, **common)
        elif args.check == "monotonicity":
            report = check(entry, trials=args.trials, rounds=args.rounds, **common)
        elif args.check == "convexity":
            report = check(entry, trials=args.trials, k_mix=args.k_mix, **common)
        elif args.check == "subadditivity":
            report = check(entry, _subadditivity_bases(args.trials, config.seed),
                           **common)
        else:
            report = check(entry, trials=args.trials, **common)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rows = [["summary", report.name, report.measure, report.trials,
             report.tolerance, report.max_excess, int(report.passed), "", "", ""]]
    for v in report.violations:
        rows.append(["violation", report.name, report.measure, "", "", v.excess,
                     "", v.descriptor, v.lhs, v.rhs])
    _emit_csv(_resolve_out(config, args.out),
              ["row", "check", "measure", "trials", "tolerance", "excess",
               "passed", "descriptor", "lhs", "rhs"],
              rows, config, comments=list(report.notes))
    return 0 if report.passed else 1


def cmd_thm2(args, config: RunConfig) -> int:
    try:
        entry = measures.get_entry(args.measure)
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    checks = config.checks()
    f_rule = axioms.F_RULES.get(args.f_rule)
    if f_rule is None:
        raise InputError(f"unknown fidelity rule {args.f_rule!r}; known: "
                         f"{sorted(axioms.F_RULES)}")

    # conditions a and b need arbitrary mixed inputs, which the isotropic
    # closed form cannot eat; they are delegated to the optimizer instance
    delegate = measures.get_entry("e_r") if entry.name == "e_r_iso" else entry
    trials = args.trials
    rep_a = axioms.check_weak_monotonicity(delegate, trials=trials,
                                           seed=config.seed,
                                           budget=config.budget, checks=checks)
    bases = _subadditivity_bases(3, config.seed)
    rep_b = axioms.check_partial_subadditivity(delegate, bases, seed=config.seed,
                                               budget=config.budget, checks=checks)
    if entry.name == "e_r_iso":
        d_list = [2 ** k for k in range(1, int(math.log2(args.d_max)) + 1)]
    else:
        d_list = list(range(2, args.d_max + 1))
    try:
        rows = axioms.isotropic_scaling_scan(entry, d_list, f_rule,
                                             budget=config.budget, seed=config.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    ratios = [r.ratio for r in rows]
    cond_c = all(b >= a - 1e-12 for a, b in zip(ratios, ratios[1:]))

    comments = [axioms.CONTINUITY_NOTE,
                f"condition_a: {'pass' if rep_a.passed else 'fail'} "
                f"(weak monotonicity, measure={delegate.name}, "
                f"max_excess={rep_a.max_excess:.3e})",
                f"condition_b: {'pass' if rep_b.passed else 'fail'} "
                f"(partial subadditivity, measure={delegate.name}, "
                f"max_excess={rep_b.max_excess:.3e})",
                f"condition_c: {'pass' if cond_c else 'fail'} "
                f"(ratio non-decreasing along d={d_list})"]
    _emit_csv(_resolve_out(config, args.out),
              ["d", "fidelity", "value", "ratio"],
              [[r.d, r.fidelity, r.value, r.ratio] for r in rows],
              config, comments=comments)
    return 0 if (rep_a.passed and rep_b.passed and cond_c) else 1


def cmd_sandwich(args, config: RunConfig) -> int:
    checks = config.checks()
    rows = []
    all_ok = True
    if args.state is not None:
        rho, _ = read_state_file(args.state)
        if (rho.dim_a, rho.dim_b) != (2, 2):
            raise InputError(f"sandwich needs a 2 x 2 state, got "
                             f"({rho.dim_a} x {rho.dim_b})")
        rep = axioms.sandwich_report(rho, budget=config.budget,
                                     seed=config.seed, checks=checks)
        rows.append([rep.fidelity, rep.lower, rep.middle, rep.upper,
                     int(rep.passed)])
        all_ok = rep.passed
    else:
        for step in range(11):
            fid = 0.5 + 0.05 * step
            lower, middle, upper = axioms.isotropic_sandwich_closed(fid)
            ordered = (lower <= middle + checks.exact
                       and middle <= upper + checks.exact)
            rows.append([fid, lower, middle, upper, int(ordered)])
            all_ok = all_ok and ordered
    _emit_csv(_resolve_out(config, args.out),
              ["F", "lower", "middle", "upper", "ordered"], rows, config)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # the flags live on the root parser and again on every subparser (with
    # suppressed defaults) so they are accepted on either side of the command
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--budget", type=int, default=default(None),
                        help="optimizer budget (iterations / candidate evals)")
    parser.add_argument("--out", default=default(None),
                        help="output path (default stdout)")
    parser.add_argument("--tol-exact", type=float,
                        default=default(DEFAULT_CHECKS.exact))
    parser.add_argument("--tol-fw", type=float,
                        default=default(DEFAULT_CHECKS.fw_value))
    parser.add_argument("--tol-opt", type=float,
                        default=default(DEFAULT_CHECKS.opt_vs_opt))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entbounds",
        description="Entanglement measures and bound checks on state files.")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="write a state file")
    _add_common(p_gen, suppress=True)
    p_gen.add_argument("family", choices=GEN_FAMILIES)
    p_gen.add_argument("--d", type=int)
    p_gen.add_argument("--fidelity", type=float)
    p_gen.add_argument("--probs", type=float, nargs=4)
    p_gen.add_argument("--dims", type=int, nargs=2)
    p_gen.add_argument("--rank", type=int)
    p_gen.add_argument("--terms", type=int)

    p_meas = sub.add_parser("measure", help="evaluate measures on a state file")
    _add_common(p_meas, suppress=True)
    p_meas.add_argument("state")
    p_meas.add_argument("--measures", nargs="+", default=["all"])

    p_fuzz = sub.add_parser("fuzz", help="run one axiom check")
    _add_common(p_fuzz, suppress=True)
    p_fuzz.add_argument("check", choices=["normalization", "separable",
                                          "monotonicity", "convexity",
                                          "weak_monotonicity", "subadditivity"])
    p_fuzz.add_argument("measure")
    p_fuzz.add_argument("--trials", type=int, default=200)
    p_fuzz.add_argument("--rounds", type=int, default=1, choices=[1, 2])
    p_fuzz.add_argument("--k-mix", type=int, default=3)

    p_thm2 = sub.add_parser("thm2", help="distillation-bound condition battery")
    _add_common(p_thm2, suppress=True)
    p_thm2.add_argument("measure")
    p_thm2.add_argument("--d-max", type=int, default=64)
    p_thm2.add_argument("--f-rule", default="1-1/d")
    p_thm2.add_argument("--trials", type=int, default=50)

    p_sand = sub.add_parser("sandwich", help="lower/middle/upper bound sweep")
    _add_common(p_sand, suppress=True)
    p_sand.add_argument("--state", default=None,
                        help="state file (default: isotropic fidelity grid)")
    return parser


COMMANDS = {
    "gen": cmd_gen,
    "measure": cmd_measure,
    "fuzz": cmd_fuzz,
    "thm2": cmd_thm2,
    "sandwich": cmd_sandwich,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    config = RunConfig(seed=args.seed, budget=args.budget,
                       tol_exact=args.tol_exact, tol_fw=args.tol_fw,
                       tol_opt=args.tol_opt,
                       out_dir=os.environ.get(ENV_OUT_DIR, "."))
    try:
        return COMMANDS[args.command](args, config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
