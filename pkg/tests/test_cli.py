import csv
import json

import pytest

from discrete_pfaffian.cli import main, parse_weight, InputError


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("DISCRETE_PFAFFIAN_OUT", str(tmp_path))
    return tmp_path


def load(path):
    return json.loads(path.read_text())


def test_parse_weight():
    assert parse_weight("charlier:a=2").kind.a == 2.0
    m = parse_weight("meixner:beta=2,c=0.3")
    assert (m.kind.beta, m.kind.c) == (2.0, 0.3)
    with pytest.raises((InputError, ValueError)):
        parse_weight("hermite:a=1")


def test_kernel_symplectic_blocks(out, capsys):
    assert main(["kernel", "--weight", "charlier:a=1", "--flavor", "sympl", "--N", "2"]) == 0
    csvs = sorted(out.glob("kernel_K_N4_*.csv"))
    assert len(csvs) == 4
    head = csvs[0].read_text().splitlines()[0]
    assert head.startswith("#") and "rows=" in head and "weight=" in head
    rep = load(out / "kernel_K_N4_report.json")
    assert rep["route_agreement"]


def test_kernel_closed_route_logs_resolution(out):
    assert main(["kernel", "--weight", "charlier:a=1", "--N", "2", "--route", "closed"]) == 0
    rep = load(out / "kernel_K_N4_report.json")
    assert "sign_resolution" in rep


def test_invalid_parameter_exit_code(out, capsys):
    assert main(["kernel", "--weight", "meixner:beta=2,c=1.5"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["kernel", "--N", "0"]) == 2
    assert main(["nosuchcommand"]) == 2


def test_verify_oracle_passes(out):
    assert main(["verify", "--suite", "oracle", "--weight", "charlier:a=1", "--N", "1"]) == 0
    rep = load(out / "verify_oracle.json")
    assert rep["pass"]
    for chk in rep["checks"]:
        assert set(chk) >= {"check_id", "identity", "residual", "tolerance", "pass"}


def test_verify_debruijn_reproducible(out):
    assert main(["verify", "--suite", "debruijn", "--seed", "7"]) == 0
    first = (out / "verify_debruijn.json").read_bytes()
    assert main(["verify", "--suite", "debruijn", "--seed", "7"]) == 0
    assert (out / "verify_debruijn.json").read_bytes() == first


def test_verify_operators_has_residual_map(out):
    assert main(["verify", "--suite", "operators", "--weight", "meixner:beta=2,c=0.3"]) == 0
    text = (out / "verify_operators.json").read_text()
    assert "epsilon_closed_vs_generic" in text


@pytest.mark.parametrize("suite", ["projection", "commutators", "difference", "zmeasure"])
def test_other_suites_pass(out, suite):
    assert main(["verify", "--suite", suite, "--weight", "charlier:a=1"]) == 0


def test_correlate_logs_subsets(out):
    assert main(["correlate", "--points", "3,7", "--flavor", "sympl", "--N", "2"]) == 0
    rep = load(out / "correlate.json")
    assert len(rep["subset_terms"]) == 4
    assert 0 <= rep["rho"] <= 1


def test_oracle_command(out):
    assert main(["oracle", "--N", "2", "--L", "20", "--top", "3"]) == 0
    rep = load(out / "oracle.json")
    assert len(rep["top"]) == 3
    rows = list(csv.DictReader((out / "oracle_density.csv").open()))
    assert sum(float(r["rho1"]) for r in rows) == pytest.approx(2.0, abs=1e-10)


def test_limit_laguerre_table(out):
    assert main(["limit", "--target", "laguerre", "--alpha", "1", "--N", "1"]) == 0
    rows = list(csv.DictReader((out / "limit_laguerre.csv").open()))
    assert len(rows) == 3
    for key in ("DS", "S", "NpS", "SNm", "NpSNm"):
        assert key in rows[0]


def test_limit_charlier_table(out):
    assert main(["limit", "--target", "charlier", "--schedule", "10,100"]) == 0
    rows = list(csv.DictReader((out / "limit_charlier.csv").open()))
    assert len(rows) == 2


def test_zmeasure_proportionality(out):
    assert main(["zmeasure", "--check", "proportionality", "--beta", "2", "--xi", "0.3", "--N", "2"]) == 0
    rep = load(out / "zmeasure_proportionality.json")
    assert rep["max_rel_error"] < 1e-10


def test_config_file_and_override(out, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nN=2\ntop=2\n")
    assert main(["--config", str(cfg), "oracle", "--L", "16"]) == 0
    assert len(load(out / "oracle.json")["top"]) == 2
    assert load(out / "oracle.json")["N"] == 2
    assert main(["--config", str(cfg), "oracle", "--L", "16", "--N", "1"]) == 0
    assert load(out / "oracle.json")["N"] == 1


def test_out_flag_beats_env(out, tmp_path):
    target = tmp_path / "explicit"
    assert main(["--out", str(target), "zmeasure", "--check", "hook", "--cutoff", "8"]) == 0
    assert (target / "zmeasure_hook.json").exists()
