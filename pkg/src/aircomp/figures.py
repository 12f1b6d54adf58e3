"""Bundled experiment definitions reproducing the reference figures as data.

Each bundle writes the scenario JSON, a results CSV (one row per series and
axis point with every metric) and a plot-ready long-format CSV (series, x, y)
into the output directory, plus a manifest with the seed and scenario hashes.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

from . import __version__
from .functions import FunctionSpec
from .modem import SchemeConfig
from .simulator import Scenario, run_csi_error_experiment, run_sweep

FIGURES = ("fig7a", "fig7b", "fig9", "fig10")

_DEFAULT_TRIALS = {"fig7a": 50_000, "fig7b": 50_000, "fig9": 10_000, "fig10": 10_000}
_DEFAULT_SEED = 20_240
_SNR_AXIS = (-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 19.0)


def _fig7_series(name: str):
    if name == "fig7a":
        K = 10
        sum_schemes = [
            ("sumcomp", SchemeConfig("sumcomp", {"levels": 64, "q": 8})),
            ("channelcomp", SchemeConfig("channelcomp", {"levels": 64})),
            ("analog_da", SchemeConfig("analog_da")),
        ]
        geo_schemes = [
            ("sumcomp", SchemeConfig("sumcomp", {"levels": 8, "q": 3})),
            ("channelcomp", SchemeConfig("channelcomp", {"levels": 8})),
            ("analog_da", SchemeConfig("analog_da")),
        ]
    else:
        K = 100
        sum_schemes = [
            ("tbma", SchemeConfig("tbma_fsk", {"levels": 64})),
            ("analog_da", SchemeConfig("analog_da")),
        ]
        geo_schemes = [
            ("tbma", SchemeConfig("tbma_fsk", {"levels": 64})),
            ("analog_da", SchemeConfig("analog_da")),
        ]
    series = []
    f_sum = FunctionSpec("sum", (1.0, 64.0), K)
    f_geo = FunctionSpec("geometric_mean", (1.0, 8.0), K)
    for label, cfg in sum_schemes:
        series.append((f"{label}_sum", f_sum, cfg))
    for label, cfg in geo_schemes:
        series.append((f"{label}_geomean", f_geo, cfg))
    return series


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit_figure_bundle(name: str, out_dir, trials: int | None = None,
                       seed: int | None = None, workers: int = 1) -> list[Path]:
    """Run the named bundle and write scenario/results/plot files.

    Returns the written paths. ``trials`` and ``seed`` override the bundled
    defaults (the defaults reproduce the reference experiment sizes).
    """
    if name not in FIGURES:
        raise ValueError(f"unknown figure bundle {name!r}; choose from {FIGURES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = trials if trials is not None else _DEFAULT_TRIALS[name]
    sd = seed if seed is not None else _DEFAULT_SEED
    t0 = time.time()

    result_rows: list[list] = []
    plot_rows: list[list] = []
    scenario_obj: dict = {"figure": name, "trials": n, "seed": sd}
    hashes = {}

    if name in ("fig7a", "fig7b"):
        for label, spec, cfg in _fig7_series(name):
            scn = Scenario(function=spec, scheme=cfg, snr_db=_SNR_AXIS,
                           trials=n, seed=sd)
            res = run_sweep(scn, workers=workers)
            hashes[label] = scn.hash()
            scenario_obj.setdefault("series", {})[label] = json.loads(scn.to_json())
            for row in res.to_rows():
                result_rows.append(
                    [label, row["snr_db"], row["mse"], row["nmse"], row["outage"],
                     row["cer"], row["ci"], row["trials"]]
                )
                plot_rows.append([label, row["snr_db"], row["nmse"]])
        axis = "snr_db"
    elif name == "fig9":
        scenario_obj.update(K=10, snr_db=[0, 10, 20, 30],
                            deviation_deg=list(range(0, 100, 10)))
        results = run_csi_error_experiment(
            [10], scenario_obj["snr_db"], scenario_obj["deviation_deg"], n, sd,
            workers=workers)
        for (K, snr), res in sorted(results.items()):
            label = f"snr_{int(snr)}dB"
            for row in res.to_rows():
                result_rows.append(
                    [label, row["deviation_deg"], row["mse"], row["nmse"],
                     row["outage"], row["cer"], row["ci"], row["trials"]]
                )
                plot_rows.append([label, row["deviation_deg"], row["mse"]])
        axis = "deviation_deg"
    else:  # fig10
        scenario_obj.update(K=list(range(1, 11)), snr_db=[10, 20],
                            deviation_deg=[0, 30, 60, 90])
        results = run_csi_error_experiment(
            scenario_obj["K"], scenario_obj["snr_db"],
            scenario_obj["deviation_deg"], n, sd, workers=workers)
        by_series: dict[str, list] = {}
        for (K, snr), res in sorted(results.items()):
            for dev, rep in zip(res.axis_values, res.reports):
                label = f"snr_{int(snr)}dB_dev_{int(dev)}deg"
                by_series.setdefault(label, []).append((K, rep))
        for label, pairs in sorted(by_series.items()):
            for K, rep in sorted(pairs):
                result_rows.append(
                    [label, K, rep.mse, rep.nmse, "", "", rep.confidence_halfwidth,
                     rep.trial_count]
                )
                plot_rows.append([label, K, rep.mse])
        axis = "K"

    scn_path = out / f"{name}_scenario.json"
    scn_path.write_text(json.dumps(scenario_obj, indent=2, sort_keys=True))
    res_path = out / f"{name}_results.csv"
    _write_csv(res_path, ["series", axis, "mse", "nmse", "outage", "cer", "ci", "trials"],
               result_rows)
    plot_path = out / f"{name}_plotdata.csv"
    _write_csv(plot_path, ["series", "x", "y"], plot_rows)
    manifest = {
        "figure": name,
        "seed": sd,
        "trials": n,
        "version": __version__,
        "scenario_hashes": hashes,
        "wall_time_s": time.time() - t0,
    }
    man_path = out / f"{name}_manifest.json"
    man_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return [scn_path, res_path, plot_path, man_path]
