"""Command-line interface.

Exit codes: 0 success or accept, 1 usage or input error, 2 gate reject,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io, plots
from ._accel import USE_NUMBA
from .aggregate import combinatorial_aggregate
from .consistency import DISTANCES, ConsistencyConfig, pcm_consistency
from .errors import PcmError, ResourceError
from .pcm import Mode, PerturbationConfig, as_weights
from .pipeline import (
    DEFAULT_REQUIREMENTS,
    PAPER_TABLE,
    PAPER_TREND,
    PAPER_WEIGHTS,
    Algorithm,
    build_threshold_table,
    correlation,
    curve_trend_points,
    default_grid,
    fit_linear_trend,
    gate_decision,
    paper_table,
    run_sweep,
    table_trend_points,
)
from .search import FitnessModel, GaConfig, Objective, exhaustive_search, ga_search

EXIT_OK, EXIT_INPUT, EXIT_REJECT, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("pcm_threshold")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _weights(text: str) -> np.ndarray:
    """Comma list like ``1,2,4`` or a path to a file of numbers."""
    p = Path(text)
    if p.is_file():
        text = p.read_text()
    return as_weights(_float_list(text))


def _add_perturbation_flags(p):
    p.add_argument("--weights", type=_weights, default=np.array(PAPER_WEIGHTS),
                   help="reference weights: comma list or file (default: 1,√3,3,3√3,9)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PM.value,
                   help="gene alphabet: pm = {+,-}, pmz = {+,-,0}")
    p.add_argument("--half-matrix", dest="half_matrix", action="store_const", const=True, default=True,
                   help="perturb the upper triangle and mirror reciprocals (default)")
    p.add_argument("--full-matrix", dest="half_matrix", action="store_const", const=False,
                   help="perturb every off-diagonal entry independently")


def _add_search_flags(p, default_algo="exhaustive"):
    p.add_argument("--algo", choices=[a.value for a in Algorithm], default=default_algo)
    p.add_argument("--pop", type=int, default=GaConfig.population_size, help="GA population size")
    p.add_argument("--mutation", type=float, default=None, help="GA per-gene mutation probability (default 1/L)")
    p.add_argument("--stall", type=int, default=GaConfig.stall_limit,
                   help="GA stop after this many non-improving offspring")
    p.add_argument("--max-evals", type=int, default=GaConfig.max_evaluations)
    p.add_argument("--seed", type=int, default=0)


def _add_index_flags(p):
    p.add_argument("--distance", choices=DISTANCES, default="identity",
                   help="distance applied to estimate differences in the consistency index")


def _add_out(p, default):
    p.add_argument("--out", type=Path, default=Path(default), help=f"output directory (default: {default})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcm-threshold", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--config", type=Path, help="key = value file mirroring the flags; flags override it")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="calibrate worst-case Δ(δ) and I(δ) curves")
    _add_perturbation_flags(p)
    _add_search_flags(p)
    _add_index_flags(p)
    p.add_argument("--delta", type=_float_list, help="explicit δ grid (fractions), overrides --delta-from/to/step")
    p.add_argument("--delta-from", type=float, default=0.0)
    p.add_argument("--delta-to", type=float, default=0.5)
    p.add_argument("--delta-step", type=float, default=0.025)
    _add_out(p, "out")

    p = sub.add_parser("table", help="threshold table I(Δ) from a sweep curve")
    p.add_argument("--curve", type=Path, help="curve CSV from `sweep` (default: run the default sweep)")
    p.add_argument("--requirements", type=_float_list, default=list(DEFAULT_REQUIREMENTS),
                   help="required deviations Δ in percent")
    p.add_argument("--floor-requirement", type=float, default=None,
                   help="Δ used for the floor row (default: half the smallest requirement)")
    _add_out(p, "out")

    p = sub.add_parser("fit", help="linear trend of the threshold against Δ")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--table", type=Path, help="table CSV from `table`")
    src.add_argument("--curve", type=Path, help="curve CSV from `sweep` (dense fit)")
    src.add_argument("--paper", action="store_true", help="fit the published reference table")
    _add_out(p, "out")

    p = sub.add_parser("gate", help="decide whether a PCM is consistent enough to aggregate")
    p.add_argument("--pcm", type=Path, required=True, help="PCM text file")
    p.add_argument("--required-delta", type=float, required=True, help="required reliability Δ in percent")
    p.add_argument("--table", default=None,
                   help="table CSV, or `paper` for the published values (default: calibrate from --weights)")
    p.add_argument("--weights", type=_weights, default=None,
                   help="reference weights for on-the-fly calibration (default: paper weights when n = 5)")
    _add_index_flags(p)

    p = sub.add_parser("search", help="worst case at a single δ")
    _add_perturbation_flags(p)
    _add_search_flags(p, default_algo="ga")
    _add_index_flags(p)
    p.add_argument("--delta", type=float, required=True, help="relative error of comparisons (fraction)")
    p.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.MAX_DEVIATION.value)
    p.add_argument("--out", type=Path, default=None, help="optional JSON result file")

    p = sub.add_parser("aggregate", help="priority vector and consistency report of a PCM")
    p.add_argument("--pcm", type=Path, required=True)
    _add_index_flags(p)

    p = sub.add_parser("check", help="verify GA results against exhaustive enumeration")
    _add_perturbation_flags(p)
    _add_search_flags(p, default_algo="ga")
    _add_index_flags(p)
    p.add_argument("--delta", type=_float_list, default=[0.1, 0.3, 0.5])
    p.add_argument("--seeds", type=int, default=5, help="number of consecutive seeds starting at --seed")
    p.add_argument("--out", type=Path, default=None, help="optional CSV of per-run results")
    return parser


def _config_tokens(parser: argparse.ArgumentParser, command: str, config: dict[str, str]) -> list[str]:
    """Translate config entries to flags understood by ``command``; unrelated keys are skipped."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    known = {}
    for action in sub._actions:
        for opt in action.option_strings:
            known[opt.lstrip("-")] = action
    tokens = []
    for key, value in config.items():
        action = known.get(key)
        if action is None:
            continue
        if isinstance(action, (argparse._StoreConstAction, argparse._StoreTrueAction)):
            on = value.lower() in ("1", "true", "yes", "on")
            if key == "half-matrix" and not on:
                tokens.append("--full-matrix")
            elif key == "full-matrix" and not on:
                tokens.append("--half-matrix")
            elif on:
                tokens.append(f"--{key}")
        else:
            tokens += [f"--{key}", value]
    return tokens


def _ga_config(args) -> GaConfig:
    return GaConfig(args.pop, args.mutation, args.stall, args.max_evals, args.seed)


def _ccfg(args) -> ConsistencyConfig:
    return ConsistencyConfig(args.distance)


def _grid(args) -> list[float]:
    if args.delta:
        return sorted(args.delta)
    return default_grid(args.delta_from, args.delta_to, args.delta_step)


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    curve = run_sweep(args.weights, _grid(args), Mode(args.mode), args.half_matrix, Algorithm(args.algo),
                      _ccfg(args), _ga_config(args))
    args.out.mkdir(parents=True, exist_ok=True)
    io.write_curve_csv(curve, args.out / "curve.csv")
    if len(curve.points) >= 2:
        plots.render_plot(curve, args.out / "fig4_curves.svg")
        plots.render_threshold_graphs(curve, args.out / "fig5_threshold_graphs.svg")
    print("delta,delta_max_pct,i_min")
    for p in curve.points:
        print(f"{p.delta:.4f},{p.delta_max_pct:.4f},{p.i_min:.6f}")
    if len(curve.points) >= 3:
        print(f"# corr(Δ_max, 1 - I_min) = {correlation(curve):.4f}")
    log.info("sweep finished in %.2fs (%s kernels)", time.perf_counter() - t0, "numba" if USE_NUMBA else "numpy")
    print(f"# wrote {args.out / 'curve.csv'}")
    return EXIT_OK


def cmd_table(args) -> int:
    curve = io.read_curve_csv(args.curve) if args.curve else run_sweep(PAPER_WEIGHTS)
    table = build_threshold_table(curve, args.requirements, args.floor_requirement)
    args.out.mkdir(parents=True, exist_ok=True)
    io.write_table_csv(table, args.out / "table.csv", {"curve": curve.provenance})
    with (args.out / "table_vs_paper.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta_pct", "generated", "paper", "clamped"])
        w.writerow(["floor", f"{table.floor_threshold:.9f}", "0.95", ""])
        for r in table.rows:
            ref = PAPER_TABLE.get(r.delta_requirement_pct)
            w.writerow([f"{r.delta_requirement_pct:.9f}", f"{r.threshold:.9f}",
                        "" if ref is None else f"{ref}", "yes" if r.clamped else ""])
    plots.render_threshold_table(table, args.out / "fig6_threshold.svg")
    print(f"{'Δ, %':>8} {'generated':>10} {'paper':>6}")
    print(f"{'floor':>8} {table.floor_threshold:10.4f} {0.95:6.2f}")
    for r in table.rows:
        ref = PAPER_TABLE.get(r.delta_requirement_pct)
        mark = "  (clamped: beyond calibrated Δ range)" if r.clamped else ""
        print(f"{r.delta_requirement_pct:8.1f} {r.threshold:10.4f} {'' if ref is None else f'{ref:6.2f}'}{mark}")
    print(f"# wrote {args.out / 'table.csv'}")
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.curve:
        points, source = curve_trend_points(io.read_curve_csv(args.curve)), args.curve.name
    elif args.table:
        points, source = table_trend_points(io.read_table_csv(args.table)), args.table.name
    else:
        points, source = table_trend_points(paper_table()), "paper"
    fit = fit_linear_trend(points)
    args.out.mkdir(parents=True, exist_ok=True)
    result = {"source": source, "slope": fit.slope, "intercept": fit.intercept, "residual_rms": fit.residual_rms,
              "reference_slope": PAPER_TREND[0], "reference_intercept": PAPER_TREND[1]}
    (args.out / "fit.json").write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    plots.render_trend(points, fit, args.out / "fig7_trend.svg")
    print(f"slope: {fit.slope:.6f}")
    print(f"intercept: {fit.intercept:.6f}")
    print(f"residual_rms: {fit.residual_rms:.6f}")
    print(f"# published trend for reference: I = {PAPER_TREND[0]} Δ + {PAPER_TREND[1]}")
    return EXIT_OK


def _gate_table(args, pcm):
    ccfg = _ccfg(args)
    if args.table == "paper":
        return paper_table()
    if args.table:
        return io.read_table_csv(args.table)
    weights = args.weights
    if weights is None:
        if pcm.n != len(PAPER_WEIGHTS):
            raise PcmError(f"PCM has n={pcm.n}; pass --weights of length {pcm.n} or --table for calibration")
        weights = np.array(PAPER_WEIGHTS)
    if len(weights) != pcm.n:
        raise PcmError(f"--weights has {len(weights)} values but the PCM has n={pcm.n}")
    return build_threshold_table(run_sweep(weights, ccfg=ccfg))


def cmd_gate(args) -> int:
    pcm = io.parse_pcm_file(args.pcm)
    table = _gate_table(args, pcm)
    verdict = gate_decision(pcm, args.required_delta, table, _ccfg(args))
    print(f"decision: {'accept' if verdict.accept else 'reject'}")
    print(f"index: {verdict.index:.9f}")
    print(f"threshold: {verdict.threshold:.9f}")
    print(f"required_delta_pct: {args.required_delta:g}")
    print(f"weakest_alternative: {verdict.weakest_alternative + 1}")
    print("per_alternative: " + " ".join(f"{x:.9f}" for x in verdict.per_alternative))
    print(f"reciprocal: {str(pcm.reciprocal).lower()}")
    if verdict.accept:
        print("aggregated: " + " ".join(f"{x:.9f}" for x in verdict.aggregated))
    return EXIT_OK if verdict.accept else EXIT_REJECT


def cmd_search(args) -> int:
    cfg = PerturbationConfig(args.delta, Mode(args.mode), args.half_matrix)
    obj = Objective(args.objective)
    if Algorithm(args.algo) is Algorithm.EXHAUSTIVE:
        res = exhaustive_search(args.weights, cfg, obj, _ccfg(args))
    else:
        res = ga_search(args.weights, cfg, obj, _ccfg(args), _ga_config(args))
    pattern = " ".join({-1: "-", 0: "0", 1: "+"}[int(g)] for g in res.best_pattern)
    print(f"objective: {obj.value}")
    print(f"best_score: {res.best_score:.9f}")
    print(f"best_pattern: {pattern}")
    print(f"evaluations: {res.evaluations}")
    print(f"exhaustive: {str(res.exhaustive).lower()}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps({
            "objective": obj.value, "delta": args.delta, "best_score": res.best_score,
            "best_pattern": [int(g) for g in res.best_pattern], "evaluations": res.evaluations,
            "exhaustive": res.exhaustive}, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    pcm = io.parse_pcm_file(args.pcm)
    report = pcm_consistency(pcm, _ccfg(args))
    vec = combinatorial_aggregate(pcm)
    print("priority: " + " ".join(f"{x:.9f}" for x in vec))
    print(f"index: {report.overall:.9f}")
    print("per_alternative: " + " ".join(f"{x:.9f}" for x in report.per_alternative))
    print(f"weakest_alternative: {report.argmin + 1}")
    print(f"reciprocal: {str(pcm.reciprocal).lower()}")
    return EXIT_OK


def cmd_check(args) -> int:
    rows = []
    ga_base = _ga_config(args)
    for delta in sorted(args.delta):
        cfg = PerturbationConfig(delta, Mode(args.mode), args.half_matrix)
        model = FitnessModel(args.weights, cfg, _ccfg(args))
        for obj in Objective:
            exact = exhaustive_search(args.weights, cfg, obj, model=model).best_score
            for seed in range(args.seed, args.seed + args.seeds):
                ga = GaConfig(ga_base.population_size, ga_base.mutation_prob, ga_base.stall_limit,
                              ga_base.max_evaluations, seed)
                got = ga_search(args.weights, cfg, obj, ga=ga, model=model).best_score
                exceeded = obj.sign * (got - exact) > 1e-9
                rows.append((delta, obj.value, seed, exact, got, abs(got - exact) <= 1e-9, exceeded))
    print("delta,objective,seed,exhaustive,ga,match")
    for r in rows:
        print(f"{r[0]:.4f},{r[1]},{r[2]},{r[3]:.9f},{r[4]:.9f},{'yes' if r[5] else 'no'}")
    hits = sum(r[5] for r in rows)
    print(f"# GA attained the exhaustive optimum in {hits}/{len(rows)} runs")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["delta", "objective", "seed", "exhaustive", "ga", "match"])
            for r in rows:
                w.writerow([f"{r[0]:.9f}", r[1], r[2], f"{r[3]:.9f}", f"{r[4]:.9f}", int(r[5])])
    if any(r[6] for r in rows):
        print("# error: GA reported a score beyond the exhaustive optimum", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "table": cmd_table, "fit": cmd_fit, "gate": cmd_gate,
            "search": cmd_search, "aggregate": cmd_aggregate, "check": cmd_check}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config", type=Path)
        known, _ = pre.parse_known_args(argv)
        command = next((a for a in argv if a in COMMANDS), None)
        if known.config and command:
            config = io.read_config_file(known.config)
            k = argv.index(command)
            argv = argv[: k + 1] + _config_tokens(parser, command, config) + argv[k + 1:]
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (PcmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
