import json
import os

import pytest

from stoch_imc.cli import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    emit_occupancy_map,
    main,
)
from stoch_imc.circuits import CircuitKind, build_circuit
from stoch_imc.config import ENV_CONFIG_VAR
from stoch_imc.netlist import lower_to_primitives
from stoch_imc.scheduler import schedule_and_map


def _run(tmp_path, *argv):
    return main(["--out", str(tmp_path), *argv])


def _only_run_dir(tmp_path):
    dirs = [d for d in tmp_path.iterdir() if d.is_dir()]
    assert len(dirs) == 1
    return dirs[0]


class TestOpCommand:
    def test_writes_report_summary_schedule(self, tmp_path):
        assert _run(tmp_path, "--seed", "7", "op", "mult",
                    "--a", "0.6", "--b", "0.5") == EXIT_OK
        out = _only_run_dir(tmp_path)
        doc = json.loads((out / "report.json").read_text())
        assert doc["mode"] == "bit-parallel"
        assert doc["decoded_outputs"]["y"] == pytest.approx(0.3, abs=0.1)
        assert (out / "summary.csv").read_text().startswith("mode,q,pass_count")
        assert "cycle 1:" in (out / "schedule.txt").read_text()

    def test_same_seed_byte_identical_report(self, tmp_path):
        _run(tmp_path / "one", "--seed", "3", "op", "mult")
        _run(tmp_path / "two", "--seed", "3", "op", "mult")
        a = (_only_run_dir(tmp_path / "one") / "report.json").read_bytes()
        b = (_only_run_dir(tmp_path / "two") / "report.json").read_bytes()
        assert a == b

    def test_different_seed_changes_report(self, tmp_path):
        _run(tmp_path / "one", "--seed", "3", "op", "mult")
        _run(tmp_path / "two", "--seed", "4", "op", "mult")
        a = (_only_run_dir(tmp_path / "one") / "report.json").read_bytes()
        b = (_only_run_dir(tmp_path / "two") / "report.json").read_bytes()
        assert a != b

    def test_bad_value_exits_failure(self, tmp_path, capsys):
        assert _run(tmp_path, "op", "mult", "--a", "1.5") == EXIT_FAILURE
        assert "error" in capsys.readouterr().err


class TestAppCommand:
    def test_synthetic_app_run(self, tmp_path):
        assert _run(tmp_path, "app", "hdp", "--no-arch") == EXIT_OK
        out = _only_run_dir(tmp_path)
        doc = json.loads((out / "app.json").read_text())
        assert doc["app"] == "hdp"
        assert doc["mae_percent"] < 7.0
        lines = (out / "results.csv").read_text().strip().splitlines()
        assert lines[0] == "input-id,golden,stochastic,abs-error"

    def test_pgm_input(self, tmp_path):
        import numpy as np
        from stoch_imc.apps import ImageGrid, save_pgm
        img = tmp_path / "in.pgm"
        save_pgm(img, ImageGrid(np.full((4, 4), 100, dtype=np.uint8)))
        code = _run(tmp_path, "app", "lit", "--input", str(img),
                    "--window", "3", "--no-arch")
        assert code == EXIT_OK


class TestScheduleCommand:
    def test_mult_netlist_dump(self, tmp_path, capsys):
        nf = tmp_path / "mult.net"
        nf.write_text("PI a\nPI b\nPO y\n1 AND a,b -> y\n")
        assert _run(tmp_path, "schedule", str(nf)) == EXIT_OK
        out = capsys.readouterr().out
        assert "cycle 1:" in out
        assert "logic cycles: 1" in out
        assert "occupied columns: 3" in out

    def test_adder_netlist_via_file(self, tmp_path, capsys):
        from stoch_imc.circuits import build_binary_adder
        from stoch_imc.netlist import format_netlist
        nf = tmp_path / "add4.net"
        nf.write_text(format_netlist(build_binary_adder(4)))
        assert _run(tmp_path, "schedule", str(nf)) == EXIT_OK
        assert "logic cycles: 9" in capsys.readouterr().out

    def test_parse_error_exits_failure(self, tmp_path, capsys):
        nf = tmp_path / "bad.net"
        nf.write_text("PI a\n1 FROB a -> y\n")
        assert _run(tmp_path, "schedule", str(nf)) == EXIT_FAILURE
        assert "error" in capsys.readouterr().err


class TestSweepCommand:
    def test_subarray_size_sweep(self, tmp_path):
        assert _run(tmp_path, "sweep", "subarray-size", "--op", "mult",
                    "--sizes", "16,256") == EXIT_OK
        out = _only_run_dir(tmp_path)
        lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == "app,axis,value,total_cycles,total_energy_aj,pass_count"
        assert len(lines) == 3

    def test_flip_rate_sweep_matches_library(self, tmp_path):
        from stoch_imc.apps import AppKind, synthetic_input
        from stoch_imc.arch import ArchConfig
        from stoch_imc.bitstream import RandomSource
        from stoch_imc.reliability import error_sweep, sweep_csv
        assert _run(tmp_path, "--seed", "5", "sweep", "flip-rate",
                    "--app", "hdp", "--rates", "0,20",
                    "--trials", "30") == EXIT_OK
        out = _only_run_dir(tmp_path)
        got = (out / "sweep.csv").read_bytes().decode()
        app = synthetic_input(AppKind.HDP, seed=5)
        ref = error_sweep(app, ArchConfig(), RandomSource(5),
                          rates=(0.0, 0.2), trials=30)
        assert got == sweep_csv([ref])

    def test_bitstream_length_sweep(self, tmp_path):
        assert _run(tmp_path, "sweep", "bitstream-length", "--app", "hdp",
                    "--bls", "64,256", "--trials", "2") == EXIT_OK
        out = _only_run_dir(tmp_path)
        lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == "app,axis,value,mean_error,stderr,trials"
        assert len(lines) == 3


class TestReportCommand:
    def test_schema_listing(self, tmp_path, capsys):
        assert _run(tmp_path, "report", "--schema") == EXIT_OK
        out = capsys.readouterr().out
        assert "summary.csv: mode,q,pass_count" in out
        assert "config keys:" in out
        assert "arch.bitstream_length" in out

    def test_regenerates_identical_summary(self, tmp_path):
        _run(tmp_path, "--seed", "2", "op", "mult")
        run = _only_run_dir(tmp_path)
        original = (run / "summary.csv").read_bytes()
        (run / "summary.csv").unlink()
        assert main(["report", str(run)]) == EXIT_OK
        assert (run / "summary.csv").read_bytes() == original

    def test_missing_report_fails(self, tmp_path, capsys):
        assert main(["report", str(tmp_path)]) == EXIT_FAILURE
        assert "report.json" in capsys.readouterr().err


class TestConfigHandling:
    def test_config_file_applies(self, tmp_path):
        cf = tmp_path / "cfg.json"
        cf.write_text('{"arch.bitstream_length": 64}')
        assert main(["--config", str(cf), "--out", str(tmp_path),
                     "op", "mult"]) == EXIT_OK
        out = _only_run_dir(tmp_path)
        doc = json.loads((out / "report.json").read_text())
        assert doc["bitstream_length"] == 64

    def test_override_flag(self, tmp_path):
        assert _run(tmp_path, "--set", "arch.bitstream_length=128",
                    "op", "mult") == EXIT_OK
        out = _only_run_dir(tmp_path)
        doc = json.loads((out / "report.json").read_text())
        assert doc["bitstream_length"] == 128

    def test_unknown_key_exits_config(self, tmp_path, capsys):
        assert _run(tmp_path, "--set", "arch.warp_speed=9",
                    "op", "mult") == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_env_var_config(self, tmp_path, monkeypatch):
        cf = tmp_path / "cfg.json"
        cf.write_text('{"arch.bitstream_length": 32}')
        monkeypatch.setenv(ENV_CONFIG_VAR, str(cf))
        assert _run(tmp_path, "op", "mult") == EXIT_OK
        out = _only_run_dir(tmp_path)
        doc = json.loads((out / "report.json").read_text())
        assert doc["bitstream_length"] == 32

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["op", "frobnicate"])
        assert exc.value.code == EXIT_USAGE


class TestOccupancyMap:
    def test_mult_grid(self):
        nl = lower_to_primitives(build_circuit(CircuitKind.MULT))
        sched = schedule_and_map(nl, q=1)
        text = emit_occupancy_map(sched)
        assert "logic cycles: 1" in text
        assert "r1   ###" in text

    def test_empty_schedule(self):
        from stoch_imc.netlist import Netlist, PrimaryInput
        nl = Netlist(gates=[], pis=[PrimaryInput("a")], pos=["a"])
        sched = schedule_and_map(nl, q=1)
        text = emit_occupancy_map(sched)
        assert "cells occupied" in text or "occupied" in text
