import json
import subprocess
import sys

import pytest

from secgrowth.cli import load_config, run
from secgrowth.errors import ConfigInvalid


def invoke(args):
    return subprocess.run(
        [sys.executable, "-m", "secgrowth.cli", *args],
        capture_output=True,
        text=True,
    )


class TestConfig:
    def test_defaults_applied(self):
        cfg = load_config(None, "toy", {})
        assert cfg["beta"] == 1.0 and cfg["mass"] == 1.0 and cfg["rel_tol"] == 1e-8

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{"bogus_key": 1}')
        with pytest.raises(ConfigInvalid):
            load_config(str(p), "toy", {})

    def test_wrong_experiment_rejected(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{"experiment": "decay"}')
        with pytest.raises(ConfigInvalid):
            load_config(str(p), "toy", {})

    def test_malformed_json_exits_nonzero_no_partial_files(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "out"
        proc = invoke(["decay-check", "--config", str(bad), "--out", str(out)])
        assert proc.returncode == 2
        assert not out.exists() or not any(out.iterdir())


class TestRuns:
    def test_decay_check_deterministic_bytes(self, tmp_path):
        cfg = load_config(None, "decay", {"seed": 5})
        run(cfg, tmp_path / "a")
        run(cfg, tmp_path / "b")
        csv_a = (tmp_path / "a" / "decay.csv").read_bytes()
        csv_b = (tmp_path / "b" / "decay.csv").read_bytes()
        assert csv_a == csv_b

    def test_cancel_scalar_verdict(self, tmp_path):
        cfg = load_config(None, "cancel-scalar", {"seed": 9})
        sidecar = run(cfg, tmp_path)
        assert sidecar["verdict"] == "CANCELLED"
        assert sidecar["residual"] < 1e-12
        data = json.loads((tmp_path / "cancel_scalar_verdict.json").read_text())
        assert data["verdict"] == "CANCELLED"
        assert data["config_hash"] == sidecar["config_hash"]

    def test_cancel_dirac_verdict(self, tmp_path):
        cfg = load_config(None, "cancel-dirac", {"seed": 3, "trials": 50})
        sidecar = run(cfg, tmp_path)
        assert sidecar["verdict"] == "CANCELLED"

    def test_cumulant_verdict(self, tmp_path):
        cfg = load_config(None, "cumulant", {"trials": 10})
        sidecar = run(cfg, tmp_path)
        assert sidecar["verdict"] == "CANCELLED"
        assert sidecar["residual"] < 1e-10

    def test_toy_growth_verdict(self, tmp_path):
        cfg = load_config(None, "toy", {})
        cfg["order"] = 2
        cfg["t_grid"] = {"start": 20.0, "stop": 200.0, "num": 24}
        sidecar = run(cfg, tmp_path)
        assert sidecar["verdict"] == "GROWTH"
        assert abs(sidecar["exponent"] - 0.5) < 0.15
        csv = (tmp_path / "toy.csv").read_text().splitlines()
        assert csv[0] == "t,value,error_estimate"
        assert len(csv) == 25

    def test_propagator_envelope_bounded(self, tmp_path):
        cfg = load_config(None, "propagator", {})
        cfg["t_grid"] = {"start": 2.0, "stop": 64.0, "num": 10}
        sidecar = run(cfg, tmp_path)
        assert sidecar["verdict"] == "BOUNDED"
        assert sidecar["envelope_max_over_min"] < 10.0

    def test_cli_entrypoint_runs(self, tmp_path):
        proc = invoke(
            ["decay-check", "--out", str(tmp_path), "--seed", "5"]
        )
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["verdict"] == "CANCELLED"


class TestVerdictReproducibility:
    def test_verdict_refit_from_csv_rows(self, tmp_path):
        from secgrowth.quadrature import fit_growth_exponent
        from secgrowth.toymodel import fit_order_growth

        cfg = load_config(None, "toy", {})
        cfg["t_grid"] = {"start": 20.0, "stop": 200.0, "num": 24}
        sidecar = run(cfg, tmp_path)
        rows = [
            tuple(map(float, line.split(",")))
            for line in (tmp_path / "toy.csv").read_text().splitlines()[1:]
        ]
        refit = fit_order_growth([(t, v) for t, v, _ in rows], (20.0, 200.0))
        assert refit.exponent == pytest.approx(sidecar["exponent"], abs=1e-12)
        assert (refit.exponent > 0.2 and refit.r_squared > 0.95) == (
            sidecar["verdict"] == "GROWTH"
        )
