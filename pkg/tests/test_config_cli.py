"""Unit tests for configuration loading, the report container and the CLI."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from cauchyflow import cli
from cauchyflow.config import ConfigError, ScenarioConfig, load_config
from cauchyflow.report import (FAIL, INCONCLUSIVE, PASS, DiagnosticsReport,
                               ReportEntry)

BUNDLED = ("cauchy_disk", "cauchy_ellipse", "cauchy_gaussian",
           "euler_rankine", "cauchy_two_patches")


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_load_and_validate(name):
    cfg = load_config(cli._resolve_config(name))
    assert cfg.name == name
    cfg.validate()


def write_cfg(tmp_path, body):
    p = tmp_path / "c.yaml"
    p.write_text(body)
    return p


MINIMAL = """\
scenario: t
kernel: {kind: cauchy, theta: 0.0}
initial: {shape: disk, radius: 1.0, amplitude: 1.0}
grid: {extent: 5.0, n: 50}
numerics: {blob_spacing: 0.2, blob_radius: 0.3, dt: 0.1, t_end: 0.2}
"""


def test_minimal_config_loads(tmp_path):
    cfg = load_config(write_cfg(tmp_path, MINIMAL))
    assert cfg.shape == "disk" and cfg.dt == 0.1


def test_unknown_key_is_hard_error_with_path(tmp_path):
    bad = MINIMAL + "diagnostics: {tol_rell: 0.1}\n"
    with pytest.raises(ConfigError) as exc:
        load_config(write_cfg(tmp_path, bad))
    assert "tol_rell" in str(exc.value)


def test_t_end_must_be_step_multiple(tmp_path):
    bad = MINIMAL.replace("t_end: 0.2", "t_end: 0.25")
    with pytest.raises(ConfigError):
        load_config(write_cfg(tmp_path, bad))


def test_sample_times_validated(tmp_path):
    bad = MINIMAL + "diagnostics: {sample_times: [0.17]}\n"
    with pytest.raises(ConfigError):
        load_config(write_cfg(tmp_path, bad))


def test_grid_extent_must_cover_support(tmp_path):
    bad = MINIMAL.replace("extent: 5.0", "extent: 2.0")
    with pytest.raises(ConfigError):
        load_config(write_cfg(tmp_path, bad))


def test_divergence_mode_off_survives_yaml_boolean(tmp_path):
    # YAML 1.1 parses a bare `off` as boolean False; the loader must map it
    # back to the string mode
    cfg = load_config(write_cfg(
        tmp_path, MINIMAL.replace(
            "t_end: 0.2", "t_end: 0.2, divergence_mode: off")))
    assert cfg.divergence_mode == "off"


def test_invalid_shape_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig(shape="pentagon").validate()


def test_invalid_kernel_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig(kernel_kind="biot").validate()


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def test_report_entry_compare_margins():
    e = ReportEntry.compare("c", 0.5, 1.0, 2.0)
    assert e.status == PASS and e.margin == 1.0
    e = ReportEntry.compare("c", 0.5, 3.0, 2.0)
    assert e.status == FAIL and e.margin == -1.0
    assert math.isnan(ReportEntry.inconclusive("c", 0.0).measured)


def test_report_verdict_ignores_soft_failures():
    r = DiagnosticsReport()
    r.add(ReportEntry.compare("soft", 0.0, 5.0, 1.0, hard=False))
    assert r.all_hard_pass()
    r.add(ReportEntry.compare("hard", 0.0, 5.0, 1.0))
    assert not r.all_hard_pass()
    assert len(r.hard_failures()) == 1


def test_report_csv_roundtrip_parseable(tmp_path):
    r = DiagnosticsReport(scenario={"name": "x"})
    r.add(ReportEntry.compare("a", 0.25, np.float64(0.1), np.float64(0.3)))
    r.add(ReportEntry.inconclusive("b", 1.0))
    path = tmp_path / "report.csv"
    r.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "check,t,measured,bound,margin,pass"
    assert "np.float64" not in lines[1]       # plain repr, byte-stable
    check, t, meas, bound, margin, status = lines[1].split(",")
    assert float(t) == 0.25 and float(meas) == 0.1 and status == PASS
    assert "inconclusive" in lines[2]


def test_summary_text_mentions_verdict():
    r = DiagnosticsReport(scenario={"name": "x", "dt": 0.1})
    r.add(ReportEntry.compare("a", 0.0, 1.0, 2.0))
    s = r.summary_text()
    assert "verdict: PASS" in s and "scenario: x" in s


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_resolves_bundled_names():
    path = cli._resolve_config("cauchy_disk")
    assert path.endswith("cauchy_disk.yaml") and os.path.exists(path)
    with pytest.raises(FileNotFoundError):
        cli._resolve_config("no_such_scenario")


def test_cli_config_error_exit_code(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path), "run", "no_such"]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text(MINIMAL + "surprise_key: 1\n")
    assert cli.main(["--out", str(tmp_path), "run", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_run_writes_outputs(quick_config, tmp_path, capsys):
    rc = cli.main(["--out", str(tmp_path), "run", quick_config])
    assert rc == 0
    assert (tmp_path / "report.csv").exists()
    assert (tmp_path / "summary.txt").exists()
    assert "verdict: PASS" in capsys.readouterr().out


def test_cli_run_reports_failure_exit_code(quick_config, tmp_path, capsys):
    # shrinking every tolerance far below the discretization error must
    # flip hard checks and the exit code, not crash
    rc = cli.main(["--out", str(tmp_path), "--tol-scale", "1e-3",
                   "run", quick_config])
    assert rc == 1
    assert "verdict: FAIL" in capsys.readouterr().out


def test_cli_blowup_exit_code(quick_config, tmp_path, monkeypatch, capsys):
    from cauchyflow import runner
    from cauchyflow.dynamics import BlowupError

    def boom(cfg, out_dir=None, tol_scale=1.0):
        raise BlowupError("max |v| exceeded the abort threshold")

    monkeypatch.setattr(runner, "run_scenario", boom)
    rc = cli.main(["--out", str(tmp_path), "run", quick_config])
    assert rc == 3
    assert "blow-up" in capsys.readouterr().err


def test_cli_converge_writes_csv(quick_config, tmp_path, capsys):
    rc = cli.main(["--out", str(tmp_path), "converge", quick_config,
                   "--param", "h", "--levels", "3"])
    out = (tmp_path / "converge.csv").read_text().splitlines()
    assert out[0] == "level,h,diff,order"
    assert len(out) == 4
    assert rc in (0, 1)       # exit reflects monotonicity verdict
    assert "np.float64" not in "".join(out)


def test_cli_velform_writes_csv(tmp_path):
    # euler branch: q must vanish identically
    rc = cli.main(["--out", str(tmp_path), "velform", "euler_rankine",
                   "--levels", "1"])
    assert rc == 0
    head = (tmp_path / "velform.csv").read_text().splitlines()[0]
    assert head.startswith("level,h,dt,r1_l2")
