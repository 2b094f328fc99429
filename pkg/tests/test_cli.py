"""Config parsing, artifact writing, determinism, and the report command."""

from __future__ import annotations

import json
import os

import pytest

from pdmat import cli, reporting


def test_parse_config_scalars_and_arrays():
    cfg = cli.parse_config("""
# a comment
experiment = "order_gain"
M_list = [8, 16]
seed = 7
tau_star = 0.01
probes = ["waterwave"]
""")
    assert cfg.experiment == "order_gain"
    assert cfg.M_list == (8, 16)
    assert cfg.seed == 7
    assert cfg.tau_star == 0.01
    assert cfg.probes == ("waterwave",)


def test_parse_config_requires_experiment():
    with pytest.raises(cli.ConfigError, match="experiment"):
        cli.parse_config("seed = 1")


def test_parse_config_unknown_key_named():
    with pytest.raises(cli.ConfigError, match="no_such_key"):
        cli.parse_config('experiment = "order_gain"\nno_such_key = 3')


def test_empty_tau_list_rejected_by_name():
    with pytest.raises(cli.ConfigError, match="tau_list"):
        cli.parse_config('experiment = "order_gain"\ntau_list = []')


def test_invalid_values_rejected():
    with pytest.raises(cli.ConfigError, match="K_list"):
        cli.parse_config('experiment = "order_gain"\nK_list = [8, 7]')
    with pytest.raises(cli.ConfigError, match="experiment"):
        cli.parse_config('experiment = "nope"')
    with pytest.raises(cli.ConfigError, match="workers"):
        cli.parse_config('experiment = "order_gain"\nworkers = 0')


def test_csv_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    rows = [{"a": 1, "b": 0.5}, {"a": 2, "b": None}]
    reporting.write_csv(path, ("a", "b"), rows, "unit")
    schema, columns, parsed = reporting.read_csv(path)
    assert "pdmat-results-v1" in schema
    assert columns == ["a", "b"]
    assert parsed[0]["b"] == "0.5"
    assert parsed[1]["b"] == ""


def test_run_is_deterministic(tmp_path):
    cfg_text = 'experiment = "order_gain"\nseed = 1\nM_list = [8, 16, 32]\n'
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert cli.run(cli.parse_config(cfg_text), out1) == 0
    assert cli.run(cli.parse_config(cfg_text), out2) == 0
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    assert (out1 / "fits.json").read_bytes() == (out2 / "fits.json").read_bytes()


def test_manifest_lists_all_files_with_hashes(tmp_path):
    cfg = cli.parse_config('experiment = "order_gain"\nM_list = [8, 16]\n')
    cli.run(cfg, tmp_path)
    manifest = reporting.read_manifest(tmp_path)
    assert set(manifest["files"]) == {"results.csv", "fits.json"}
    for name, digest in manifest["files"].items():
        assert digest == reporting.sha256_file(tmp_path / name)
    assert manifest["config"]["seed"] == 1
    assert manifest["status"] == "ok"


def test_run_splitting_orders_small(tmp_path):
    cfg = cli.parse_config(
        'experiment = "splitting_orders"\nM_list = [16]\ns_list = [1.0]\n'
        'seed = 2\n')
    rc = cli.run(cfg, tmp_path)
    assert rc == 0
    fits = json.loads((tmp_path / "fits.json").read_text())
    assert abs(fits["lie_s1"]["slope"] - 2.0) <= 0.25
    assert abs(fits["strang_s1"]["slope"] - 3.0) <= 0.25


def test_broken_tolerance_fails_with_measured_slope(tmp_path, capsys):
    cfg = cli.parse_config(
        'experiment = "splitting_orders"\nM_list = [16]\ns_list = [1.0]\n'
        'fit_band = 0.001\n')
    rc = cli.run(cfg, tmp_path)
    assert rc == 1
    assert "FAIL" in capsys.readouterr().out
    rc = cli.report(tmp_path)
    assert rc == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "slope" in out


def test_report_missing_dir_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        cli.report(tmp_path / "nope")


def test_report_writes_dat_files(tmp_path, capsys):
    cfg = cli.parse_config(
        'experiment = "splitting_orders"\nM_list = [16]\ns_list = [1.0]\nseed = 2\n')
    cli.run(cfg, tmp_path)
    assert cli.report(tmp_path) == 0
    dats = [f for f in os.listdir(tmp_path) if f.endswith(".dat")]
    assert dats
    lines = (tmp_path / dats[0]).read_text().splitlines()
    assert lines[0].startswith("#")
    assert len(lines) > 3


def test_main_entry_points(tmp_path, capsys, monkeypatch):
    assert cli.main(["list-probes"]) == 0
    out = capsys.readouterr().out
    assert "waterwave" in out and "schrodinger" in out
    cfg_path = tmp_path / "c.cfg"
    cfg_path.write_text('experiment = "order_gain"\nM_list = [8, 16]\n')
    monkeypatch.setenv("PDMAT_OUTPUT_DIR", str(tmp_path / "envout"))
    assert cli.main(["run", str(cfg_path)]) == 0
    assert (tmp_path / "envout" / "manifest.json").exists()
    assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 2


def test_workers_do_not_change_results(tmp_path):
    base = 'experiment = "splitting_orders"\nM_list = [16]\ns_list = [0.0, 1.0]\nseed = 3\n'
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    cli.run(cli.parse_config(base + "workers = 1\n"), out1)
    cli.run(cli.parse_config(base + "workers = 4\n"), out2)
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()


def test_failed_job_marked_in_manifest(tmp_path, monkeypatch):
    cfg = cli.parse_config('experiment = "order_gain"\nM_list = [8, 16]\n')

    def boom(_cfg):
        raise ArithmeticError("synthetic numerical failure")
    monkeypatch.setitem(cli.RUNNERS, "order_gain", boom)
    rc = cli.run(cfg, tmp_path)
    assert rc == 1
    manifest = reporting.read_manifest(tmp_path)
    assert manifest["status"].startswith("failed")
    assert (tmp_path / "results.csv").exists()
