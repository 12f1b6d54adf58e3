"""Command-line front end.

Subcommands cover scenario execution, scheme comparison, constellation design
and checking, the power policy and MIMO beamformer solvers, composite
coefficient prediction and figure-bundle regeneration. Every run writes a
manifest (scenario hash, seed, version) next to its outputs. Exit codes:
0 success, 2 usage or malformed input, 3 constraint/feasibility failure,
4 numerical failure. Errors print one JSON object per line on stderr.

Set AIRCOMP_LOG=debug|info|warning to control verbosity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constellation import (Constellation, build_function_table, check_feasibility,
                            optimize_channelcomp)
from .channel import ChannelRealization, ImpairmentProfile
from .errors import ConstraintError, NumericalError
from .figures import FIGURES, emit_figure_bundle
from .functions import FunctionSpec, evaluate_function
from .mimo import MimoScenario, aggregation_beamformer
from .modem import SCHEMES, SchemeConfig
from .ofdm import OfdmConfig, predict_composite
from .power_control import solve_optimal_policy
from .simulator import Scenario, run_scheme_comparison, run_sweep

log = logging.getLogger("aircomp")


def _setup_logging() -> None:
    level = os.environ.get("AIRCOMP_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _fail(exc: Exception, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


def _write_manifest(out_dir: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    (out_dir / "manifest.json").write_text(json.dumps(payload, indent=2, sort_keys=True))


def _write_sweep_csv(path: Path, result, series: str | None = None) -> None:
    rows = result.to_rows()
    header = (["series"] if series else []) + list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(([series] if series else []) + list(row.values()))


def _cmd_run(args) -> int:
    scenario = Scenario.from_json(Path(args.scenario).read_text())
    if args.seed is not None:
        scenario = Scenario.from_json(
            json.dumps({**json.loads(scenario.to_json()), "seed": args.seed}))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_sweep(scenario, workers=args.workers)
    (out / "scenario.json").write_text(scenario.to_json())
    if args.format == "csv":
        _write_sweep_csv(out / "results.csv", result)
    else:
        (out / "results.json").write_text(json.dumps(
            {"axis": result.axis_name, "rows": result.to_rows()}, indent=2))
    _write_manifest(out, {"scenario_hash": scenario.hash(), "seed": scenario.seed})
    log.info("wrote results to %s", out)
    return 0


def _cmd_compare(args) -> int:
    obj = json.loads(Path(args.scenario).read_text())
    function = FunctionSpec.from_json(json.dumps(obj["function"]))
    schemes = [SchemeConfig.from_json(json.dumps(s)) for s in obj["schemes"]]
    seed = args.seed if args.seed is not None else int(obj["seed"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_scheme_comparison(schemes, function, obj["snr_db"],
                                    int(obj["trials"]), seed, workers=args.workers)
    with open(out / "results.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series", "snr_db", "mse", "nmse", "outage", "cer", "ci", "trials"])
        for name, res in results.items():
            for row in res.to_rows():
                writer.writerow([name] + list(row.values()))
    _write_manifest(out, {"seed": seed, "schemes": [s.scheme for s in schemes]})
    return 0


def _function_from_flag(name: str, input_range, K: int) -> FunctionSpec:
    return FunctionSpec(name, tuple(input_range), K)


def _load_constellation(path: str, function: str) -> Constellation:
    obj = json.loads(Path(path).read_text())
    symbols = [np.array([complex(re, im) for re, im in node])
               for node in obj["per_node_symbols"]]
    K = len(symbols)
    levels = np.asarray(obj["levels"], dtype=float)
    spec = FunctionSpec(function, (float(levels.min()), float(levels.max())), K)
    table = build_function_table(lambda v: evaluate_function(spec, v), levels, K)
    budgets = np.asarray(obj.get(
        "power_budgets", [float(np.max(np.abs(a) ** 2)) for a in symbols]))
    return Constellation(symbols, budgets, table)


def _cmd_check_constellation(args) -> int:
    cons = _load_constellation(args.infile, args.function)
    result = check_feasibility(cons)
    report = {
        "feasible": result.feasible,
        "collisions": [
            {"f_i": fi, "f_j": fj} for fi, fj in result.colliding_f_pairs()
        ],
        "violations": [
            {k: (str(v) if isinstance(v, complex) else v) for k, v in viol.items()}
            for viol in result.violations
        ],
    }
    print(json.dumps(report, indent=2))
    if not result.feasible:
        return _fail(ConstraintError(
            f"destructive overlaps: {result.colliding_f_pairs()}"), 3)
    return 0


def _cmd_design_constellation(args) -> int:
    levels = np.arange(args.levels, dtype=float)
    spec = FunctionSpec(args.function, (0.0, float(args.levels - 1)), args.nodes)
    table = build_function_table(lambda v: evaluate_function(spec, v), levels, args.nodes)
    cons, delta = optimize_channelcomp(table, args.levels, args.nodes,
                                       [args.budget] * args.nodes,
                                       restarts=args.restarts, seed=args.seed or 0)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(cons.to_json())
    print(json.dumps({"delta": delta, "out": str(out)}))
    return 0


def _cmd_power_policy(args) -> int:
    h = np.asarray(json.loads(args.channels), dtype=float)
    P = np.asarray(json.loads(args.budgets), dtype=float)
    policy = solve_optimal_policy(h, P, args.noise)
    print(policy.to_json())
    return 0


def _cmd_mimo(args) -> int:
    scenario = MimoScenario.from_json(Path(args.scenario).read_text())
    bf = aggregation_beamformer(scenario)
    print(bf.to_json())
    return 0


def _cmd_sync_predict(args) -> int:
    obj = json.loads(Path(args.scenario).read_text())
    config = OfdmConfig(**obj["ofdm"])
    realization = ChannelRealization.from_json(json.dumps(obj["channel"]))
    profile = ImpairmentProfile.from_json(json.dumps(obj["impairments"]))
    composite = predict_composite(config, realization, profile)
    writer = csv.writer(sys.stdout if args.out is None else open(args.out, "w", newline=""))
    writer.writerow(["node", "subcarrier", "re", "im"])
    for k in range(composite.shape[0]):
        for ell in range(composite.shape[1]):
            c = composite[k, ell]
            writer.writerow([k, ell, c.real, c.imag])
    return 0


def _cmd_list_schemes(_args) -> int:
    for name in SCHEMES:
        print(name)
    return 0


def _cmd_figures(args) -> int:
    paths = emit_figure_bundle(args.name, args.out, trials=args.trials,
                               seed=args.seed, workers=args.workers)
    for p in paths:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aircomp",
        description="Simulation toolkit for computation over multiple access channels",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario sweep")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("compare", help="run a multi-scheme comparison")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("design-constellation", help="optimize a constellation")
    p.add_argument("--function", required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--budget", type=float, default=1.0)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_design_constellation)

    p = sub.add_parser("check-constellation", help="feasibility-check a constellation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--function", required=True)
    p.set_defaults(fn=_cmd_check_constellation)

    p = sub.add_parser("power-policy", help="solve the optimal power policy")
    p.add_argument("--channels", required=True, help="JSON list of |h_k|")
    p.add_argument("--budgets", required=True, help="JSON list of P_k")
    p.add_argument("--noise", type=float, required=True)
    p.set_defaults(fn=_cmd_power_policy)

    p = sub.add_parser("mimo-beamform", help="solve the aggregation beamformer")
    p.add_argument("--scenario", required=True)
    p.set_defaults(fn=_cmd_mimo)

    p = sub.add_parser("sync-predict", help="closed-form composite coefficients")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_sync_predict)

    p = sub.add_parser("list-schemes", help="list supported schemes")
    p.set_defaults(fn=_cmd_list_schemes)

    p = sub.add_parser("figures", help="regenerate a bundled figure's data")
    p.add_argument("--name", required=True, choices=FIGURES)
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_figures)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        return _fail(exc, 2)
    except ConstraintError as exc:
        return _fail(exc, 3)
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return _fail(exc, 4)


if __name__ == "__main__":
    sys.exit(main())
