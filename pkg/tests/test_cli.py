import csv
import json

import numpy as np
import pytest

from aircomp.cli import main
from aircomp.functions import FunctionSpec
from aircomp.modem import SchemeConfig
from aircomp.simulator import Scenario

LEFT = [[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]]
RIGHT = [[0.5, 0.5], [-0.5, -0.5], [-0.5, 0.5], [0.5, -0.5]]
LEVELS = [1.0, 2.0, -1.0, -2.0]


def _write_constellation(path, mapping):
    path.write_text(json.dumps({
        "per_node_symbols": [mapping, mapping],
        "levels": LEVELS,
        "power_budgets": [1.0, 1.0],
    }))


def _scenario_file(tmp_path, trials=600, seed=5):
    scn = Scenario(
        function=FunctionSpec("sum", (1.0, 64.0), 10),
        scheme=SchemeConfig("sumcomp", {"levels": 64, "q": 8}),
        snr_db=(0.0, 10.0), trials=trials, seed=seed)
    path = tmp_path / "scn.json"
    path.write_text(scn.to_json())
    return path


def test_run_happy_path(tmp_path):
    scn = _scenario_file(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(scn), "--out", str(out)]) == 0
    assert (out / "results.csv").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 5
    assert "scenario_hash" in manifest


def test_run_round_trip_bit_identical(tmp_path):
    scn = _scenario_file(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["run", "--scenario", str(scn), "--out", str(out1)])
    # re-run from the emitted scenario
    main(["run", "--scenario", str(out1 / "scenario.json"), "--out", str(out2)])
    assert (out1 / "results.csv").read_text() == (out2 / "results.csv").read_text()


def test_run_worker_counts_identical(tmp_path):
    scn = _scenario_file(tmp_path, trials=5000)
    outs = []
    for w in (1, 4, 16):
        out = tmp_path / f"w{w}"
        main(["run", "--scenario", str(scn), "--out", str(out), "--workers", str(w)])
        outs.append((out / "results.csv").read_text())
    assert outs[0] == outs[1] == outs[2]


def test_run_malformed_scenario_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert json.loads(err.strip())["error"]


def test_check_constellation_feasible(tmp_path):
    path = tmp_path / "left.json"
    _write_constellation(path, LEFT)
    assert main(["check-constellation", "--in", str(path), "--function", "sum"]) == 0


def test_check_constellation_reports_collision(tmp_path, capsys):
    path = tmp_path / "right.json"
    _write_constellation(path, RIGHT)
    code = main(["check-constellation", "--in", str(path), "--function", "sum"])
    captured = capsys.readouterr()
    assert code == 3
    report = json.loads(captured.out)
    assert report["feasible"] is False
    assert report["collisions"] == [{"f_i": -3.0, "f_j": 3.0}]


def test_power_policy_example(capsys):
    assert main(["power-policy", "--channels", "[1.0]", "--budgets", "[1.0]",
                 "--noise", "1.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["eta"] == pytest.approx(4.0)
    assert out["powers"] == [1.0]


def test_design_constellation(tmp_path, capsys):
    out = tmp_path / "cons.json"
    code = main(["design-constellation", "--function", "sum", "--levels", "2",
                 "--nodes", "2", "--out", str(out), "--seed", "3",
                 "--restarts", "6"])
    assert code == 0
    result = json.loads(capsys.readouterr().out)
    assert result["delta"] > 0
    assert out.exists()


def test_mimo_beamform(tmp_path, capsys):
    rng = np.random.default_rng(0)
    chans = [
        [[[float(rng.standard_normal()), float(rng.standard_normal())]
          for _ in range(2)] for _ in range(3)]
        for _ in range(2)
    ]
    path = tmp_path / "mimo.json"
    path.write_text(json.dumps({"channels": chans, "streams": 1,
                                "power_cap": 1.0, "noise_variance": 0.0}))
    assert main(["mimo-beamform", "--scenario", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["eta"] > 0


def test_sync_predict(tmp_path, capsys):
    obj = {
        "ofdm": {"num_subcarriers": 4, "symbol_duration": 1.0,
                 "cp_duration": 0.25, "backoff": 0.125, "oversampling": 2},
        "channel": {"flat_gains": [[1.0, 0.0]], "noise_variance": 0.0},
        "impairments": {"cfo": [0.0], "to": [0.0], "po": [0.0],
                        "rx_to": 0.125, "backoff": 0.125},
    }
    path = tmp_path / "sync.json"
    path.write_text(json.dumps(obj))
    assert main(["sync-predict", "--scenario", str(path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "node,subcarrier,re,im"
    assert len(lines) == 5


def test_figures_unknown_name_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["figures", "--name", "fig99", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_figures_bundle_small(tmp_path):
    assert main(["figures", "--name", "fig9", "--out", str(tmp_path),
                 "--trials", "300"]) == 0
    plot = tmp_path / "fig9_plotdata.csv"
    with open(plot) as fh:
        rows = list(csv.DictReader(fh))
    series = {r["series"] for r in rows}
    assert series == {"snr_0dB", "snr_10dB", "snr_20dB", "snr_30dB"}
    xs = sorted({float(r["x"]) for r in rows})
    assert xs == [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0]


def test_compare_command(tmp_path):
    obj = {
        "function": json.loads(FunctionSpec("sum", (1.0, 64.0), 10).to_json()),
        "schemes": [json.loads(SchemeConfig("sumcomp", {"levels": 64, "q": 8}).to_json()),
                    json.loads(SchemeConfig("analog_da").to_json())],
        "snr_db": [0.0, 10.0],
        "trials": 500,
        "seed": 7,
    }
    path = tmp_path / "cmp.json"
    path.write_text(json.dumps(obj))
    out = tmp_path / "out"
    assert main(["compare", "--scenario", str(path), "--out", str(out)]) == 0
    text = (out / "results.csv").read_text()
    assert "sumcomp" in text and "analog_da" in text


def test_list_schemes(capsys):
    assert main(["list-schemes"]) == 0
    out = capsys.readouterr().out
    assert "tbma_fsk" in out and "goldenbaum" in out
