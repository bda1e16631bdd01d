import json
import math

import pytest

from gsense import csvio
from gsense import detector as det
from gsense import experiments as ex
from gsense.cli import main, parse_pair, parse_range, read_config, UsageError
from gsense.fading import Constant, SignalBand
from gsense.gnormal import GNormalParams

BOUNDS = ["bounds", "--fading", "constant:eps=1", "--noise", "1,1.4142", "--band", "1,3", "--n", "100", "--p", "0.01"]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# --- SNR mapping --------------------------------------------------------------

def test_snr_mapping_examples():
    sigma, band = ex.snr_mapping(0.0, GNormalParams(1.0, 1.0))
    assert sigma == pytest.approx(1.0, rel=1e-15)
    assert (band.sigma_x_lower, band.sigma_x_upper) == pytest.approx((0.5, 3.0), rel=1e-15)
    sigma, _ = ex.snr_mapping(0.0, GNormalParams(1.0, math.sqrt(2.0)))
    assert sigma**2 == pytest.approx(4 / 3, rel=1e-14)
    assert sigma == pytest.approx(1.1547, abs=1e-4)
    s3, _ = ex.snr_mapping(-3.0, GNormalParams(1.0, math.sqrt(2.0)))
    assert (s3 / sigma) ** 2 == pytest.approx(10**-0.3, rel=1e-14)
    assert 10**-0.3 == pytest.approx(0.5012, abs=1e-4)


# --- argument parsing ---------------------------------------------------------

def test_parse_pair_and_range():
    assert parse_pair("1,1.5", "--noise") == (1.0, 1.5)
    with pytest.raises(UsageError, match="column 3"):
        parse_pair("1,x", "--noise")
    with pytest.raises(UsageError):
        parse_pair("1,2,3", "--noise")
    assert parse_range("-1:1:0.5") == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert parse_range("-3") == [-3.0]
    assert parse_range("1,2") == [1.0, 2.0]
    with pytest.raises(UsageError):
        parse_range("1:0:1")


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# detector\nfading = constant:eps=1\nnoise = 1,1.4142\nband = 1,3  # signal band\nn = 100\np = 0.01\nbeta = 2\n")
    assert read_config(str(conf))["band"] == "1,3"
    code, out, _ = run(capsys, ["bounds", "--config", str(conf), "--beta", "1"])
    assert code == 0
    row = csvio.loads(out)[0]
    assert row["beta"] == 1.0  # flag overrides file
    assert row["lambda"] == pytest.approx(100.894, abs=1e-3)


def test_config_errors_report_line_and_column(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("n = 100\n  bogus = 1\n")
    with pytest.raises(UsageError, match=r"bad.conf:2:3: unknown key"):
        read_config(str(bad))
    bad.write_text("n = 100\n\n   no equals sign\n")
    with pytest.raises(UsageError, match=r"bad.conf:3:4:"):
        read_config(str(bad))


# --- bounds -------------------------------------------------------------------

def test_bounds_example(capsys):
    code, out, _ = run(capsys, BOUNDS + ["--beta", "1"])
    assert code == 0
    assert out.splitlines()[0].split(",") == list(det.CSV_FIELDS) + ["warning"]
    row = csvio.loads(out)[0]
    assert row["lambda"] == pytest.approx(100.894, abs=1e-3)
    assert row["fa_valid"] is False and row["fa_bound"] is None


def test_bounds_missing_flag_exits_2(capsys):
    code, _, err = run(capsys, ["bounds", "--fading", "constant:eps=1", "--noise", "1,1.4142", "--n", "100", "--p", "0.01", "--beta", "1"])
    assert code == 2
    assert "--band" in err


@pytest.mark.parametrize("argv", [
    BOUNDS,  # neither --beta nor --auto-beta
    BOUNDS + ["--beta", "zero"],
    ["bounds", "--fading", "weird:x=1", "--noise", "1,1.4", "--band", "1,3", "--n", "10", "--p", "0.01", "--beta", "1"],
    ["bounds", "--fading", "constant:eps=1", "--noise", "1;1.4", "--band", "1,3", "--n", "10", "--p", "0.01", "--beta", "1"],
    ["bounds", "--fading", "constant:eps=1", "--noise", "1,1.4", "--band", "1,3", "--n", "0", "--p", "0.01", "--beta", "1"],
])
def test_bad_input_exits_2(capsys, argv):
    assert run(capsys, argv)[0] == 2


def test_argparse_usage_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["nosuchcommand"])
    assert e.value.code == 2


def test_auto_beta_on_decay_failing_model(capsys, caplog):
    code, out, _ = run(capsys, ["bounds", "--fading", "constant:eps=1", "--noise", "1,1.4142", "--band", "1,3",
                                "--n", "10000", "--p", "0.01", "--auto-beta"])
    assert code == 0
    row = csvio.loads(out)[0]
    assert row["decay_ok"] is False
    assert "no admissible beta" in row["warning"]
    assert "no admissible beta" in caplog.text


def test_auto_beta_picks_optimum(capsys):
    code, out, _ = run(capsys, ["bounds", "--fading", "constant:eps=1", "--noise", "1,1.4142", "--band", "10,20",
                                "--n", "100", "--p", "0.01", "--auto-beta"])
    assert code == 0
    row = csvio.loads(out)[0]
    c = det.DetectorConfig(100, 0.01, 1.0, GNormalParams(1.0, 1.4142), SignalBand(10.0, 20.0), Constant(1.0))
    assert row["beta"] == det.optimize_beta(c)
    assert row["warning"] is None


# --- CSV round trip -----------------------------------------------------------

def test_bounds_csv_roundtrip(tmp_path, capsys):
    code, out, _ = run(capsys, BOUNDS + ["--beta", "0.7", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "bounds.csv").read_text() == out
    row = csvio.read(tmp_path / "bounds.csv")[0]
    c = det.DetectorConfig(100, 0.01, 0.7, GNormalParams(1.0, 1.4142), SignalBand(1.0, 3.0), Constant(1.0))
    mem = det.bound_report(c).row()
    for k, v in mem.items():
        assert row[k] == v, k


def test_fig_csv_roundtrip(tmp_path):
    cfg = ex.ExperimentConfig(experiment="fig1a", snr_db=[-2.0, 4.0], out=str(tmp_path))
    ex.run_experiment(cfg)
    fields, rows = ex.fig1_rows(cfg, 100, "signals")
    assert csvio.read(tmp_path / "fig1a.csv") == rows


@pytest.mark.parametrize("value", [0.1, 1 / 3, 1e-300, 123456789.125, -0.0, 5, True, False, None, "rician:sigma=1,v=1"])
def test_fmt_roundtrip(value):
    back = csvio.parse_value(csvio.fmt(value))
    assert back == value and type(back) is type(value)


# --- experiments --------------------------------------------------------------

def test_fig1a_ordering(tmp_path):
    cfg = ex.ExperimentConfig(experiment="fig1a", snr_db=[-6.0, -3.0, 0.0, 3.0, 6.0, 9.0], out=str(tmp_path))
    _, rows = ex.fig1_rows(cfg, 100, "signals")
    for r in rows:
        assert r["fa_aggr"] <= r["fa_cons"]
    # at a shared beta the aggressive threshold sits above the conservative one
    fixed = ex.ExperimentConfig(experiment="fig1a", beta=0.8, out=str(tmp_path))
    for snr in (-3.0, 5.0):
        r = ex.scenario_point(fixed, snr, 100)
        assert r["lambda_aggr"] >= r["lambda_cons"]
        assert r["fa_aggr"] <= r["fa_cons"]


def test_fig1b_columns(tmp_path):
    cfg = ex.ExperimentConfig(experiment="fig1b", snr_db=[0.0], out=str(tmp_path))
    m = ex.run_experiment(cfg)
    rows = csvio.read(tmp_path / "fig1b.csv")
    assert {"Gamma_0.01", "Gamma_0.7"} <= set(rows[0])
    assert m["calibrated_n"] == 100


def test_fig3_degenerate_band_curves_coincide(tmp_path):
    cfg = ex.ExperimentConfig(experiment="fig3", signal_lower_mult=1.0, signal_upper_mult=1.0, roc_points=21,
                              out=str(tmp_path))
    _, rows, _ = ex.roc_rows(cfg, 100)
    assert all(r["md_max"] == r["md_min"] for r in rows)


def test_fig3_roc_shape(tmp_path):
    cfg = ex.ExperimentConfig(experiment="fig3", roc_points=31, out=str(tmp_path))
    _, rows, _ = ex.roc_rows(cfg, 100)
    fa = [r["fa_bound"] for r in rows]
    md = [r["md_max"] for r in rows]
    assert all(a >= b for a, b in zip(fa, fa[1:]))
    assert all(a <= b for a, b in zip(md, md[1:]))
    assert all(r["md_min"] <= r["md_max"] for r in rows)


def test_fig_manifest_and_plot(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    code, out, _ = run(capsys, ["fig2", "--snr-db", "0:2:1", "--out", str(tmp_path), "--plot"])
    assert code == 0
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["files"] == ["fig2.csv", "fig2.svg"]
    assert m["config"]["n_values"] == [100, 1000]
    rows = csvio.read(tmp_path / "fig2.csv")
    assert [r["n"] for r in rows] == [100] * 3 + [1000] * 3


def test_sweep_and_baseline_commands(capsys):
    code, out, _ = run(capsys, ["sweep", "--fading", "rayleigh:sigma=1", "--noise", "1,1.4142", "--n", "100,200",
                                "--p", "0.01", "--beta", "1", "--snr-db=-2:2:2"])
    assert code == 0 and len(out.splitlines()) == 1 + 6
    code, out, _ = run(capsys, ["baseline", "--n", "100", "--p", "0.01", "--snr-db=-4:0:2", "--signal-model", "umts"])
    assert code == 0 and len(out.splitlines()) == 4
    assert run(capsys, ["baseline", "--n", "100", "--p", "0.01", "--snr-db", "0", "--signal-model", "xyz"])[0] == 2


def test_mc_command_deterministic_across_workers(tmp_path, capsys):
    argv = ["mc", "--fading", "rayleigh:sigma=1", "--noise", "1,1.4142", "--band", "1,2", "--n", "50",
            "--p", "0.05", "--beta", "1", "--trials", "5000", "--seed", "7"]
    outs = [run(capsys, argv + ["--workers", w])[1] for w in ("1", "4", "1")]
    assert outs[0] == outs[1] == outs[2]
    assert len(outs[0].splitlines()) == 17
