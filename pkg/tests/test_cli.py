import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from rtq.cli import main, run_scenario, sweep_values, thread_count
from rtq.io import read_csv_table

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def run(capsys, kind, path, *extra):
    code = main([kind, "--config", path, *extra])
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    header, rows = read_csv_table(text)
    return [dict(zip(header, row)) for row in rows]


GW = {"kind": "gw", "gw": {"epsilon": 1e-4, "tau": 50, "pair": [1, 2]}, "thermal": {"xi": 0.1}}


def test_minimal_gw(tmp_path, capsys):
    code, out, err = run(capsys, "gw", write(tmp_path, GW))
    assert code == 0
    rows = table(out)
    assert len(rows) == 1
    assert float(rows[0]["eta"]) == pytest.approx(1 - 0.1 / 3, abs=1e-12)
    assert "rtq gw: 1 row(s)" in err


def test_gw_tau_sweep(tmp_path, capsys):
    doc = dict(GW, sweep={"parameter": "gw.tau", "min": 1, "max": 100, "steps": 50, "scale": "log"})
    code, out, _ = run(capsys, "gw", write(tmp_path, doc))
    assert code == 0
    rows = table(out)
    assert len(rows) == 50
    tau = np.array([float(r["sweep:gw.tau"]) for r in rows])
    assert np.allclose(tau, np.geomspace(1, 100, 50), rtol=1e-15)
    eta = np.array([float(r["eta"]) for r in rows])
    assert np.allclose(eta, 1 - 0.1 / 3, atol=1e-12)
    energy = np.array([float(r["delta_e_c"]) for r in rows])
    ratio = energy / tau**2
    assert np.allclose(ratio, ratio[0], rtol=1e-12)


def test_out_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "gw", write(tmp_path, GW), "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("scenario_id,h,xi,")


def test_compare_columns(tmp_path, capsys):
    code, out, _ = run(capsys, "gw", write(tmp_path, GW), "--compare")
    assert code == 0
    (row,) = table(out)
    assert set(row) == {"scenario_id", "h", "xi", "eta_closed", "eta_general", "abs_diff", "method"}
    assert float(row["abs_diff"]) <= 1e-3


@pytest.mark.parametrize(
    "doc, where",
    [
        (
            {"kind": "efficiency", "series": {"random": {"seed": 1, "n_modes": 3}}, "h": 1e-3, "thermal": {"xi": 0.1},
             "partition": {"system": [1, 2], "environment": [2, 3]}},
            "partition",
        ),
        ({"kind": "gw", "gw": {"epsilon": 1e-4, "pair": [1, 2]}}, "tau"),
        ({"kind": "gw", "gw": {"epsilon": "small", "tau": 1, "pair": [1, 2]}}, "gw.epsilon"),
        ({"kind": "gw", "gw": {"epsilon": 1e-4, "tau": 1, "pair": [1, 2]}, "extra": 1}, "extra"),
        (dict(GW, sweep={"parameter": "gw.nothing", "min": 1, "max": 2, "steps": 2}), "sweep.parameter"),
        (dict(GW, sweep={"parameter": "gw.tau", "min": 1, "max": 2, "steps": 1}), "sweep.steps"),
        (dict(GW, sweep={"parameter": "gw.pair", "min": 1, "max": 2, "steps": 2}), "sweep.parameter"),
    ],
)
def test_schema_violations_exit_2(tmp_path, capsys, doc, where):
    code, _, err = run(capsys, doc["kind"], write(tmp_path, doc))
    assert code == 2
    assert where in err


def test_json_syntax_error_reports_line(tmp_path, capsys):
    code, _, err = run(capsys, "gw", write(tmp_path, '{"kind": "gw",\n "gw": {,}}'))
    assert code == 2
    assert "line 2" in err


def test_non_finite_numbers_rejected(tmp_path, capsys):
    code, _, err = run(capsys, "gw", write(tmp_path, '{"kind": "gw", "gw": {"epsilon": NaN, "tau": 1, "pair": [1, 2]}}'))
    assert code == 2
    assert "NaN" in err


def test_kind_mismatch(tmp_path, capsys):
    code, _, err = run(capsys, "battery", write(tmp_path, GW))
    assert code == 2 and "kind" in err


def test_compare_unavailable_for_battery(capsys):
    code, _, _ = run(capsys, "battery", str(CONFIGS / "battery.json"), "--compare")
    assert code == 2


@pytest.mark.parametrize(
    "doc, name",
    [
        (
            {"kind": "efficiency", "series": {"random": {"seed": 1, "n_modes": 3, "scale": 0}}, "h": 1e-3,
             "thermal": {"xi": 0.1}, "partition": {"system": [1], "environment": [2, 3]}},
            "no_energy_transfer",
        ),
        (
            {"kind": "efficiency", "state_family": "tms", "series": {"random": {"seed": 1, "n_modes": 3}}, "h": 1e-3,
             "thermal": {"xi": 0.0}, "partition": {"system": [1, 2], "environment": [3]}, "squeeze": {"r": 0.01}},
            "perturbative_hierarchy_violated",
        ),
        ({"kind": "gw", "gw": {"epsilon": 1e-4, "tau": 5, "pair": [1, 2], "omega_drive": 4}}, "non_resonant_pair"),
        (
            {"kind": "battery", "series": {"random": {"seed": 1, "n_modes": 2}}, "h": 1e-3, "thermal": {"xi": 0},
             "battery": {"mode": 1}},
            "zero_temperature_unsupported",
        ),
    ],
)
def test_domain_errors_exit_3(tmp_path, capsys, doc, name):
    code, _, err = run(capsys, doc["kind"], write(tmp_path, doc), "--compare" if doc["kind"] != "battery" else "--out=/dev/null")
    assert code == 3
    assert err.startswith(f"error[{name}]")


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("RTQ_THREADS", "1")
    assert thread_count() == 1
    monkeypatch.setenv("RTQ_THREADS", "junk")
    assert thread_count() >= 1


def test_sweep_order_independent_of_threads():
    doc = json.loads((CONFIGS / "gw_tau_sweep.json").read_text())
    one = run_scenario(doc, threads=1).to_csv()
    many = run_scenario(doc, threads=8).to_csv()
    assert one == many


def test_linear_sweep_values():
    assert np.allclose(sweep_values({"min": 0, "max": 1, "steps": 5}), [0, 0.25, 0.5, 0.75, 1])


def test_integer_sweep_parameter(tmp_path, capsys):
    doc = {"kind": "battery", "series": {"random": {"seed": 1, "n_modes": 3, "scale": 0.3}}, "h": 1e-3,
           "thermal": {"xi": 1.0}, "battery": {"mode": 1},
           "sweep": {"parameter": "battery.mode", "min": 1, "max": 3, "steps": 3}}
    code, out, _ = run(capsys, "battery", write(tmp_path, doc))
    assert code == 0
    assert [r["n"] for r in table(out)] == ["1", "2", "3"]


def test_oracle_check_config(capsys):
    code, out, err = run(capsys, "oracle-check", str(CONFIGS / "oracle_check.json"))
    assert code == 0
    diffs = [float(r["abs_diff"]) for r in table(out)]
    assert max(diffs) < 1e-6


def test_console_script():
    exe = shutil.which("rtq")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "gw", "--config", str(CONFIGS / "gw_minimal.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("scenario_id,")
