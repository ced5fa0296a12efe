import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from rsp_sim.cli import main, parse_config, ConfigError

H = 1 / math.sqrt(2)


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def worked_example_config(rng):
    a = rng.uniform(0.1, 1, 8)
    return {
        "m": 3,
        "alphas": list(a / np.linalg.norm(a)),
        "etas": [0.0] + list(rng.uniform(0, 2 * math.pi, 7)),
        "channel_x": list(rng.uniform(0.1, 0.7, 3)),
        "forced_outcome": {"i": "001", "j": "001"},
    }


class TestParseConfig:
    def test_valid(self):
        cfg = parse_config("enumerate", {"m": 2, "alphas": [0.5] * 4, "channel_x": [0.5, 0.5]})
        assert cfg.desired.etas == (0.0,) * 4
        assert cfg.channels.xs == (0.5, 0.5)

    @pytest.mark.parametrize("doc,field", [
        ({"m": 2, "alphas": [0.5] * 3, "channel_x": [0.5, 0.5]}, "alphas"),
        ({"m": 1, "alphas": [1, 0], "channel_x": [0.8]}, "channel_x"),
        ({"m": 1, "alphas": [1, 1], "channel_x": [0.5]}, "alphas"),
        ({"m": 1, "alphas": [1, 0], "etas": [0.3, 0], "channel_x": [0.5]}, "etas"),
        ({"alphas": [1, 0], "channel_x": [0.5]}, "m"),
        ({"m": 4, "alphas": [0.25] * 16, "channel_x": [0.5] * 4}, "m"),
        ({"m": 1, "alphas": [1, 0], "channel_x": [0.5], "trials": 0}, "trials"),
    ])
    def test_field_errors(self, doc, field):
        with pytest.raises(ConfigError) as exc:
            parse_config("sample", doc)
        assert exc.value.field == field

    def test_normalize_flag(self):
        cfg = parse_config("enumerate", {"m": 1, "alphas": [3, 4], "channel_x": [0.5]}, normalize=True)
        assert cfg.desired.alphas == pytest.approx((0.6, 0.8))

    def test_overrides_win(self):
        cfg = parse_config("sample", {"m": 1, "alphas": [1, 0], "channel_x": [0.5], "seed": 1},
                           overrides={"seed": 9, "trials": None})
        assert cfg.seed == 9 and cfg.trials == 100_000

    def test_trace_needs_outcome(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("trace", {"m": 1, "alphas": [1, 0], "channel_x": [0.5]})
        assert exc.value.field == "forced_outcome"


def test_config_error_exit_code(tmp_path, capsys):
    path = write(tmp_path, {"m": 1, "alphas": [1, 0], "channel_x": [0.8]})
    assert main(["enumerate", "--config", path]) == 2
    assert "channel_x" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["enumerate", "--config", str(tmp_path / "nope.json")]) == 2


def test_enumerate_json_round_trip(tmp_path, rng):
    a = rng.uniform(0.1, 1, 4)
    doc = {"m": 2, "alphas": list(a / np.linalg.norm(a)), "etas": [0, 1.0, 2.0, 3.0],
           "channel_x": [0.6, H]}
    out = tmp_path / "enum.json"
    assert main(["enumerate", "--config", write(tmp_path, doc), "--out", str(out)]) == 0
    text = out.read_text()
    payload = json.loads(text)
    assert payload["tsp_formula"] == pytest.approx(0.72, abs=1e-12)
    assert abs(payload["tsp_enumerated"] - payload["tsp_formula"]) < 1e-10
    assert len(payload["branches"]) == 32
    assert set(payload["branches"][0]) == {"i", "j", "aux", "probability", "fidelity"}
    # shortest repr dumps re-parse to the same doubles
    assert json.dumps(payload, indent=2, ensure_ascii=False) + "\n" == text


def test_enumerate_maximal_total(tmp_path, capsys):
    doc = {"m": 2, "alphas": [0.5] * 4, "channel_x": [H, H]}
    assert main(["enumerate", "--config", write(tmp_path, doc)]) == 0
    assert json.loads(capsys.readouterr().out)["total_success_probability"] == pytest.approx(1.0, abs=1e-12)


def test_table2(capsys):
    assert main(["table2"]) == 0
    rows = json.loads(capsys.readouterr().out)
    ours = [(r["m"], r["cic"], r["tsp"], r["gamma"]) for r in rows if r["source"] == "computed"]
    assert ours == [(2, 4.0, 1.0, 0.2), (3, 6.0, 1.0, 0.2)]


def test_sweep_csv(tmp_path, capsys):
    assert main(["sweep", "--config", write(tmp_path, {"m": 2})]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["x0", "x1", "tsp"]
    assert len(rows) == 2501
    assert float(rows[-1][2]) == 1.0


def test_sweep_bad_grid(tmp_path):
    assert main(["sweep", "--config", write(tmp_path, {"m": 2, "grid": [[0.9], [0.1]]})]) == 2


def test_sample(tmp_path, capsys):
    doc = {"m": 2, "alphas": [0.5] * 4, "channel_x": [0.5, 0.5]}
    assert main(["sample", "--config", write(tmp_path, doc), "--trials", "20000", "--seed", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["trials"] == 20000 and out["rng_seed"] == 4
    assert abs(out["empirical_tsp"] - 0.25) < 5 * out["binomial_sigma"]


class TestTrace:
    def test_worked_example_outcome(self, tmp_path, capsys, rng):
        assert main(["trace", "--config", write(tmp_path, worked_example_config(rng))]) == 0
        out = capsys.readouterr().out
        assert "recovery: I⊗I⊗σxσz" in out
        assert float(out.split("fidelity: ")[1]) == pytest.approx(1, abs=1e-10)
        for name in ("step1_residual", "step2_corrected", "step3_receiver", "step4_aux0", "final"):
            assert name in out

    def test_json_output(self, tmp_path, capsys, rng):
        out = tmp_path / "trace.json"
        assert main(["trace", "--config", write(tmp_path, worked_example_config(rng)), "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["states"]["final"]["register"] == [3, 6, 9]

    def test_identity_outcome(self, tmp_path, capsys):
        doc = {"m": 2, "alphas": [0.5] * 4, "channel_x": [H, H], "forced_outcome": {"i": "00", "j": "00"}}
        assert main(["trace", "--config", write(tmp_path, doc)]) == 0
        assert "recovery: I⊗I" in capsys.readouterr().out

    def test_table_one_outcome(self, tmp_path, capsys):
        doc = {"m": 2, "alphas": [0.1, 0.7, 0.1, 0.7], "etas": [0, 1, 2, 3],
               "channel_x": [0.3, 0.6], "forced_outcome": {"i": "11", "j": "11"}}
        assert main(["trace", "--config", write(tmp_path, doc)]) == 0
        assert "recovery: σxσz⊗σxσz" in capsys.readouterr().out

    def test_degenerate(self, tmp_path, capsys):
        doc = {"m": 2, "alphas": [0.5] * 4, "channel_x": [0.0, 0.5], "forced_outcome": {"i": "01", "j": "00"}}
        assert main(["trace", "--config", write(tmp_path, doc)]) == 3
        assert "degenerate" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert main(["verify", "--count", "5", "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "ok" and out["specs_checked"] == 15


def test_verify_reports_counterexample(monkeypatch, capsys):
    import rsp_sim.cli as cli

    def broken(desired, channels):
        yield "tsp_formula", {"enumerated": 0.0, "formula": 1.0}

    monkeypatch.setattr(cli, "invariant_violations", broken)
    assert main(["verify", "--count", "1"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["check"] == "tsp_formula" and len(out["alphas"]) == 2


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "rsp_sim.cli", "table2", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("m,protocol")
