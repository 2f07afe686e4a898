"""Command-line harness: subcommands, exit codes, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

import torusmix as tm
from torusmix.cli import main
from torusmix.fieldio import save_field
from torusmix.norms import MixTimeSeries


def small_run_args(outdir, a="3/4", t_final="0.4", extra=()):
    return [
        "simulate", "--n", "64", "--a", a, "--t-final", t_final,
        "--snapshot-times", "0,0.2", "--outdir", str(outdir),
        "--no-stop-at-fill", *extra,
    ]


class TestSimulate:
    def test_artifacts_written(self, tmp_path):
        out = tmp_path / "run"
        assert main(small_run_args(out)) == 0
        assert (out / "timeseries.csv").exists()
        assert (out / "summary.json").exists()
        assert (out / "manifest.json").exists()
        assert (out / "snapshot_t0.0000.png").exists()
        assert (out / "snapshot_t0.2000.tmf").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert "config_hash" in manifest and "versions" in manifest

    def test_t_zero_initial_snapshot_only(self, tmp_path):
        out = tmp_path / "run0"
        code = main(
            ["simulate", "--n", "64", "--a", "0.75", "--t-final", "0",
             "--snapshot-times", "0,1,2", "--outdir", str(out)]
        )
        assert code == 0
        series = MixTimeSeries.read_csv(out / "timeseries.csv")
        assert series.time == [0.0]
        snaps = sorted(out.glob("snapshot_*.tmf"))
        assert [p.name for p in snaps] == ["snapshot_t0.0000.tmf"]

    def test_invalid_a_exits_2(self, tmp_path, capsys):
        code = main(small_run_args(tmp_path / "bad", a="1.5"))
        assert code == 2

    def test_config_file_with_fraction_strings(self, tmp_path):
        cfg = {"n": 64, "t_final": 0.1, "a": "3/4", "snapshot_times": [0.0],
               "outdir": str(tmp_path / "cfgrun"), "stop_at_spectral_fill": False}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        assert main(["simulate", "--config", str(cfg_path)]) == 0
        summary = json.loads((tmp_path / "cfgrun" / "summary.json").read_text())
        assert summary["a"] == 0.75

    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"resolution": 64}))
        assert main(["simulate", "--config", str(cfg_path)]) == 2


class TestSweep:
    def sweep_args(self, outdir, serial=True, workers=None):
        args = [
            "sweep", "--n", "64", "--t-final", "0.4",
            "--a-list", "6/12,11/12", "--snapshot-times", "",
            "--outdir", str(outdir), "--no-stop-at-fill",
        ]
        if serial:
            args.append("--serial")
        if workers is not None:
            args += ["--workers", str(workers)]
        return args

    def test_sweep_artifacts(self, tmp_path):
        out = tmp_path / "sweep"
        assert main(self.sweep_args(out)) == 0
        assert (out / "rates.csv").exists()
        assert (out / "mix_norm_vs_t.png").exists()
        assert (out / "log_mix_norm_vs_t.png").exists()
        assert (out / "rate_vs_a.png").exists()
        for a in ("a_0.5000", "a_0.9167"):
            assert (out / a / "timeseries.csv").exists()

    def test_single_member_rate_fit_degenerate(self, tmp_path, capsys):
        out = tmp_path / "sweep1"
        args = [
            "sweep", "--n", "64", "--t-final", "0.4", "--a-list", "11/12",
            "--snapshot-times", "", "--outdir", str(out), "--serial",
            "--no-stop-at-fill",
        ]
        assert main(args) == 0
        assert not (out / "rate_vs_a.png").exists()
        assert "degenerate" in capsys.readouterr().out

    def test_serial_reruns_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        assert main(self.sweep_args(out1)) == 0
        assert main(self.sweep_args(out2)) == 0
        for rel in ("rates.csv", "a_0.5000/timeseries.csv",
                    "a_0.9167/timeseries.csv"):
            assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        out1, out2 = tmp_path / "ser", tmp_path / "par"
        assert main(self.sweep_args(out1, serial=True)) == 0
        assert main(self.sweep_args(out2, serial=False, workers=2)) == 0
        for rel in ("rates.csv", "a_0.5000/timeseries.csv",
                    "a_0.9167/timeseries.csv"):
            assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


class TestAnalyze:
    def test_rate_and_envelope(self, tmp_path):
        out = tmp_path / "run"
        assert main(small_run_args(out, a="6/12", t_final="1.2")) == 0
        code = main(["analyze", str(out), "--window-start", "0.2",
                     "--window-end", "1.2"])
        assert code == 0
        payload = json.loads((out / "analysis.json").read_text())
        assert payload["envelope"]["holds"] is True
        assert payload["rate_fit"]["slope"] < 0.0
        assert (out / "envelope.png").exists()
        assert (out / "rate_fit.csv").exists()

    def test_missing_rundir_exits_2(self, tmp_path):
        assert main(["analyze", str(tmp_path / "nope")]) == 2

    def test_too_small_window_exits_3(self, tmp_path):
        out = tmp_path / "run"
        assert main(small_run_args(out, t_final="0.2")) == 0
        code = main(["analyze", str(out), "--window-start", "0.19",
                     "--window-end", "0.2"])
        assert code == 3


class TestCertify:
    def test_checkerboard_fixture_mixed(self, tmp_path):
        # +-1 tiles: the level-0.5 super level set is exactly the sign mask
        g = tm.GridSpec(64)
        x, y = g.coordinates()
        v = np.where(np.sin(16 * np.pi * x) * np.sin(16 * np.pi * y) > 0, 1.0, -1.0)
        path = tmp_path / "checker.tmf"
        save_field(path, tm.ScalarField.from_values(g, v))
        out = tmp_path / "cert"
        code = main(
            ["certify", str(path), "--level", "0.5", "--kappa", "0.4",
             "--deltas", "0.25", "--outdir", str(out)]
        )
        assert code == 0
        payload = json.loads((out / "certify.json").read_text())
        assert payload["reports"][0]["semi_mixed"] is True
        assert payload["reports"][0]["mixed"] is True
        assert (out / "mask.png").exists()

    def test_constant_fixture_never_semi_mixed(self, tmp_path):
        g = tm.GridSpec(64)
        path = tmp_path / "const.tmf"
        save_field(path, tm.ScalarField.from_values(g, np.ones(g.shape)))
        out = tmp_path / "cert"
        code = main(
            ["certify", str(path), "--level", "0.5", "--kappa", "0.25",
             "--deltas", "0.0625,0.125,0.25", "--outdir", str(out)]
        )
        assert code == 0
        payload = json.loads((out / "certify.json").read_text())
        assert all(not r["semi_mixed"] for r in payload["reports"])
        assert payload["scan"]["semi_mixing_scale"] is None

    def test_stripe_fixture_worst_center_inside(self, tmp_path):
        g = tm.GridSpec(64)
        x, _ = g.coordinates()
        v = np.where(x < 0.5, 1.0, -1.0)
        path = tmp_path / "stripe.tmf"
        save_field(path, tm.ScalarField.from_values(g, v))
        out = tmp_path / "cert"
        code = main(
            ["certify", str(path), "--level", "0.5", "--kappa", "0.25",
             "--deltas", "0.125", "--outdir", str(out)]
        )
        assert code == 0
        payload = json.loads((out / "certify.json").read_text())
        rep = payload["reports"][0]
        assert rep["semi_mixed"] is False
        assert rep["worst_center"][0] < 0.5
        assert rep["worst_fraction"] == 1.0

    def test_unreadable_field_exits_2(self, tmp_path):
        missing = tmp_path / "none.tmf"
        assert main(["certify", str(missing)]) == 2


class TestScalecheck:
    def test_report_written(self, tmp_path):
        out = tmp_path / "sc"
        code = main(["scalecheck", "--a", "0.5", "--n", "128",
                     "--outdir", str(out)])
        assert code == 0
        payload = json.loads((out / "scalecheck.json").read_text())
        assert payload["mix_norm_mismatch"] < 1e-3
        assert payload["grad_norm_mismatch"] < 1e-3

    def test_identity_scale(self, tmp_path):
        out = tmp_path / "sc1"
        code = main(["scalecheck", "--a", "1", "--n", "64", "--outdir", str(out)])
        assert code == 0
        payload = json.loads((out / "scalecheck.json").read_text())
        assert payload["mix_norm_mismatch"] == 0.0

    def test_invalid_a_exits_2(self, tmp_path):
        assert main(["scalecheck", "--a", "1.5", "--outdir", str(tmp_path)]) == 2
