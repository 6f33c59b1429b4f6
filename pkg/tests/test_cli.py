import csv
import io
import json
import math

import pytest

from hnoma import cli
from hnoma.engine import RateReport
from hnoma.errors import InvalidParameterError
from hnoma.model import SystemConfig, db2lin
from hnoma.schemes import SCHEME_NAMES


def test_empty_document_defaults():
    run_spec = cli.parse_config("")
    cfg = run_spec.system
    assert run_spec.system == SystemConfig()
    assert (cfg.M, cfg.r, cfg.d_U, cfg.n_F, cfg.n_F_B, cfg.l_F, cfg.l_T) == (4, 2.0, 0.1, 4, 1, 12, 14)
    assert (cfg.eps_U, cfg.C, cfg.gamma, cfg.a_U, cfg.L_U) == (1e-3, 2.0, 3.0, 5e-4, 2)
    assert (cfg.snr_embb_dB, cfg.snr_urllc_dB) == (3.0, 10.0)
    assert run_spec.schemes == SCHEME_NAMES and run_spec.trials == 500 and run_spec.format == "csv"


def test_parse_values_and_powers():
    run_spec = cli.parse_config("""
[system]
a_U = 0.2
L_U = 3
P_U_dBm = 20
[run]
schemes = ul-tin, DL-Superpos
trials = 7
seed = 9
[sweep]
axis = C
values = 1, 2.5
""")
    assert run_spec.system.a_U == 0.2 and run_spec.system.L_U == 3 and isinstance(run_spec.system.L_U, int)
    assert run_spec.system.P_U == pytest.approx(100.0)
    assert run_spec.schemes == ("ul-tin", "dl-superpos") and run_spec.trials == 7 and run_spec.seed == 9
    assert run_spec.axis == "C" and run_spec.values == (1.0, 2.5)


def test_validation_errors_name_field():
    with pytest.raises(InvalidParameterError, match="a_U"):
        cli.parse_config("[system]\na_U = 1.5\n")
    with pytest.raises(InvalidParameterError, match="ul-oma, ul-tin"):
        cli.parse_config("[run]\nschemes = ul-warp\n")
    with pytest.raises(InvalidParameterError, match="L_U"):
        cli.parse_config("[system]\nL_U = 2.5\n")
    with pytest.raises(InvalidParameterError, match="bogus"):
        cli.parse_config("[system]\nbogus = 1\n")
    with pytest.raises(InvalidParameterError, match="axis"):
        cli.parse_config("[sweep]\naxis = r\nvalues = 1\n")
    with pytest.raises(InvalidParameterError, match="a_U"):
        cli.parse_config("[sweep]\naxis = a_U\nvalues = 0.1, 2\n")
    with pytest.raises(InvalidParameterError, match="format"):
        cli.parse_config("[run]\nformat = xml\n")
    with pytest.raises(InvalidParameterError, match="trials"):
        cli.parse_config("[run]\ntrials = zero\n")
    with pytest.raises(InvalidParameterError, match="malformed"):
        cli.parse_config("a_U = 1\n")
    with pytest.raises(InvalidParameterError, match="not writable"):
        cli.parse_config("[run]\noutput = /nonexistent/dir/out.csv\n")


def test_config_round_trip():
    run_spec = cli.parse_config("")
    assert cli.parse_config(cli.dump_config(run_spec)) == run_spec
    swept = cli.parse_config("[sweep]\naxis = P_U\nvalues = 20, 23\n[run]\nschemes = dl-oma\n")
    assert cli.parse_config(cli.dump_config(swept)) == swept


def _report(scheme="ul-oma", value=float("nan"), rate=0.123456789012345):
    return RateReport(scheme=scheme, direction=scheme[:2], embb_rate=rate, embb_stderr=0.01,
                      urllc_rate=0.5, urllc_stderr=0.002, eps_D=5.0025e-4, L_U=2, infeasible_flag="none",
                      n_trials=10, seed=1, axis="a_U" if value == value else "", axis_value=value)


def test_csv_single_run():
    text = cli.format_results([_report()], "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(cli.CSV_COLUMNS)
    assert len(rows) == 2
    assert rows[1][0] == "" and rows[1][3] == "0.123456789012"
    assert rows[1][6] == "0.00050025"


def test_csv_sweep_rows(tmp_path):
    reports = [_report(s, v) for v in (1e-4, 1e-3, 0.01, 0.1, 1.0) for s in ("ul-oma", "ul-tin", "ul-punct")]
    path = tmp_path / "out.csv"
    text = cli.emit_results(reports, "csv", str(path))
    assert path.read_text() == text
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 15
    assert [r["scheme"] for r in rows[:3]] == ["ul-oma", "ul-tin", "ul-punct"]
    assert rows[3]["axis_value"] == "0.001"


def test_json_round_trip(tmp_path):
    reports = [_report("dl-punct", 0.4), _report("ul-oma")]
    reports[1].eps_D = float("nan")
    path = tmp_path / "out.json"
    cli.emit_results(reports, "json", str(path))
    back = cli.read_json_reports(path.read_text())
    assert len(back) == 2
    for a, b in zip(reports, back):
        for key, value in a.to_dict().items():
            other = b.to_dict()[key]
            assert (math.isnan(value) and math.isnan(other)) if isinstance(value, float) and value != value \
                else value == other
    json.loads(path.read_text())   # strict JSON, no NaN literals


def test_emit_io_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        cli.emit_results([_report()], "csv", str(bad))


def _write(tmp_path, text):
    p = tmp_path / "run.ini"
    p.write_text(text)
    return str(p)


def test_main_success_and_determinism(tmp_path):
    cfg = _write(tmp_path, "[run]\nschemes = ul-punct, dl-oma\ntrials = 2\n[sweep]\naxis = C\nvalues = 1, 4\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["run", "--config", cfg, "--out", str(out1), "--seed", "3"]) == 0
    assert cli.main(["run", "--config", cfg, "--out", str(out2), "--seed", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = list(csv.DictReader(io.StringIO(out1.read_text())))
    assert [(r["axis_value"], r["scheme"]) for r in rows] == [("1", "ul-punct"), ("1", "dl-oma"),
                                                              ("4", "ul-punct"), ("4", "dl-oma")]
    assert {r["seed"] for r in rows} == {"3"} and {r["n_trials"] for r in rows} == {"2"}


def test_main_json_and_trials_override(tmp_path):
    out = tmp_path / "r.json"
    cfg = _write(tmp_path, "[run]\nschemes = ul-oma\n")
    assert cli.main(["run", "--config", cfg, "--out", str(out), "--format", "json", "--trials", "3"]) == 0
    (row,) = json.loads(out.read_text())
    assert row["n_trials"] == 3 and row["scheme"] == "ul-oma"


def test_main_validation_exit(tmp_path, capsys):
    cfg = _write(tmp_path, "[system]\na_U = 1.5\n")
    assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 1
    assert "a_U" in capsys.readouterr().err
    assert cli.main(["run", "--config", str(tmp_path / "absent.ini"), "--out", str(tmp_path / "x.csv")]) == 1
    assert cli.main(["run", "--config", _write(tmp_path, "")]) == 1


def test_main_all_infeasible_exit(tmp_path):
    cfg = _write(tmp_path, "[system]\na_U = 0.5\nC = 0.001\n[run]\nschemes = ul-punct\ntrials = 2\n")
    out = tmp_path / "x.csv"
    assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 2
    (row,) = list(csv.DictReader(io.StringIO(out.read_text())))
    assert row["infeasible_flag"] == "fronthaul" and row["embb_rate"] == ""


def test_main_partial_infeasible_ok(tmp_path):
    cfg = _write(tmp_path, "[system]\na_U = 0.5\nC = 0.001\n[run]\nschemes = ul-punct, ul-tin\ntrials = 2\n")
    assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 0


def test_p_u_sweep_in_dbm():
    run_spec = cli.parse_config("[sweep]\naxis = P_U\nvalues = 20, 23\n[run]\nschemes = dl-superpos\n")
    pairs = list(run_spec.scenarios())
    assert [v for v, _ in pairs] == [20.0, 23.0]
    assert pairs[0][1].system.P_U == pytest.approx(db2lin(20.0))
