import hashlib
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hubscreen.cli import main
from hubscreen.errors import EmptyMatrix, MissingData, ParseError, ValidationError
from hubscreen.io import (
    IngestOptions,
    MissingPolicy,
    Orientation,
    ReportBundle,
    dumps_report,
    fmt_float,
    load_matrix,
    load_report,
    report_from_dict,
    report_to_dict,
    waterfall_csv,
    write_report,
)
from hubscreen.screen import screen
from hubscreen.stats import ScreeningParams
from hubscreen.waterfall import build_waterfall
from hubscreen.zscore import score_matrix

from conftest import gaussian

TOY = Path(__file__).resolve().parents[1] / "data" / "toy.csv"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def write_matrix(tmp_path, name, X, header=True):
    lines = [",".join(f"g{j}" for j in range(X.shape[1]))] if header else []
    lines += [",".join(fmt_float(v) for v in row) for row in X]
    return write(tmp_path, name, "\n".join(lines) + "\n")


def test_load_simple(tmp_path):
    m = load_matrix(write(tmp_path, "a.csv", "a,b\n1,2\n2,4\n3,6\n"))
    assert (m.data.n, m.data.p) == (3, 2) and m.data.labels == ["a", "b"]
    np.testing.assert_array_equal(m.data.values[:, 1], [2, 4, 6])
    assert m.sha256 == hashlib.sha256((tmp_path / "a.csv").read_bytes()).hexdigest()


def test_load_without_header_generates_labels(tmp_path):
    m = load_matrix(write(tmp_path, "a.csv", "1;2\n2;5\n3;6\n"), IngestOptions(delimiter=";", has_header=False))
    assert m.data.labels == ["v0001", "v0002"]


def test_missing_fails_by_default(tmp_path):
    path = write(tmp_path, "m.csv", "a,b,c\n1,NA,3\n2,4,5\n3,6,9\n")
    with pytest.raises(MissingData) as exc:
        load_matrix(path)
    assert exc.value.labels == ["b"]


def test_drop_columns_records_removals(tmp_path):
    path = write(tmp_path, "m.csv", "a,b,c,d\n1,NA,3,1\n2,4,5,?\n3,6,9,2\n4,1,1,7\n")
    m = load_matrix(path, IngestOptions(missing_policy=MissingPolicy.DROP_COLUMNS))
    assert m.dropped == ["b", "d"] and m.data.labels == ["a", "c"]


def test_variables_as_rows_is_transpose(tmp_path, rng):
    X = rng.standard_normal((5, 4))
    a = load_matrix(write_matrix(tmp_path, "s.csv", X, header=False), IngestOptions(has_header=False))
    b = load_matrix(
        write_matrix(tmp_path, "v.csv", X.T, header=False),
        IngestOptions(has_header=False, orientation=Orientation.VARIABLES_AS_ROWS),
    )
    np.testing.assert_array_equal(a.data.values, b.data.values)
    named = "id,s1,s2,s3\nx,1,2,3\ny,4,5,7\n"
    m = load_matrix(write(tmp_path, "n.csv", named), IngestOptions(orientation=Orientation.VARIABLES_AS_ROWS))
    assert m.data.labels == ["x", "y"] and m.data.values.shape == (3, 2)


def test_parse_error_location(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_matrix(write(tmp_path, "p.csv", "a,b\n1,2\n3,oops\n4,5\n"))
    # row is the 1-based line in the file, header included
    assert (exc.value.row, exc.value.column, exc.value.token) == (3, 2, "oops")
    with pytest.raises(ParseError):
        load_matrix(write(tmp_path, "r.csv", "a,b\n1,2\n3\n4,5\n"))


def test_empty_matrix(tmp_path):
    with pytest.raises(EmptyMatrix):
        load_matrix(write(tmp_path, "e.csv", "a,b\n"))
    with pytest.raises(EmptyMatrix):
        load_matrix(
            write(tmp_path, "f.csv", "a\nNA\n1\n2\n"), IngestOptions(missing_policy=MissingPolicy.DROP_COLUMNS)
        )


def test_fmt_float():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert float(fmt_float(math.pi)) == math.pi
    assert fmt_float(math.inf) == "inf"


def empty_report():
    Z = score_matrix(gaussian(10, 30, seed=0), "corr")
    return screen(Z, 1.0, ScreeningParams(n=10, p=30, mode="corr"))


def small_report(delta_max=None):
    Z = score_matrix(gaussian(12, 400, seed=3), "parcor")
    return screen(Z, 0.5, ScreeningParams(n=12, p=400), delta_max=delta_max)


def test_write_empty_report(tmp_path):
    files = write_report(ReportBundle(empty_report()), tmp_path / "out")
    d = json.loads(files["report"].read_text())
    assert d["counts"] == {} and d["discoveries"] == [] and d["schema_version"] == "1"
    assert files["waterfall"].read_text() == "delta,rank,vertex_label,rho_i_delta,lambda_value,p_value\n"
    assert files["summary"].exists() and files["provenance"].exists()


def test_report_roundtrip_and_waterfall_bytes(tmp_path):
    rep = small_report()
    files = write_report(ReportBundle(rep), tmp_path)
    back = load_report(files["report"])
    assert dumps_report(back) == files["report"].read_text()
    assert waterfall_csv(build_waterfall(back)) == files["waterfall"].read_text()
    assert back.params == rep.params and back.counts == rep.counts


def test_waterfall_rows_per_delta_equal_counts(tmp_path):
    rep = small_report()
    files = write_report(ReportBundle(rep), tmp_path)
    rows = files["waterfall"].read_text().splitlines()[1:]
    per = {}
    for line in rows:
        delta = int(line.split(",")[0])
        per[delta] = per.get(delta, 0) + 1
    assert [per.get(k, 0) for k in range(1, rep.d_max + 1)] == rep.counts


def test_schema_version_and_unknown_fields():
    d = report_to_dict(small_report(delta_max=2))
    d["future_field"] = {"x": 1}
    assert report_from_dict(d).delta_max == 2
    d["schema_version"] = "99"
    with pytest.raises(ValidationError):
        report_from_dict(d)


def test_write_is_byte_stable(tmp_path):
    rep = small_report()
    a = write_report(ReportBundle(rep), tmp_path / "a")
    b = write_report(ReportBundle(rep), tmp_path / "b")
    for key in a:
        assert a[key].read_bytes() == b[key].read_bytes()


# --- command line


def test_cli_screen_toy_empty(tmp_path, capsys):
    out = tmp_path / "toy"
    code = main(["screen", "--input", str(TOY), "--mode", "corr", "--rho-star", "0.99", "--out", str(out)])
    assert code == 0
    d = json.loads((out / "report.json").read_text())
    assert d["discoveries"] == [] and d["counts"] == {}
    prov = json.loads((out / "provenance.json").read_text())
    assert prov["input"]["sha256"] == hashlib.sha256(TOY.read_bytes()).hexdigest()
    assert prov["params"] == d["params"]
    assert "discoveries: 0" in capsys.readouterr().out


def test_cli_screen_and_waterfall(tmp_path, capsys):
    X = np.random.default_rng(5).standard_normal((12, 300))
    path = write_matrix(tmp_path, "x.csv", X)
    out = tmp_path / "run"
    args = ["screen", "--input", str(path), "--rho-star", "0.5", "--delta-max", "3", "--out", str(out)]
    assert main(args) == 0
    capsys.readouterr()
    assert main(["waterfall", "--report", str(out / "report.json")]) == 0
    assert capsys.readouterr().out == (out / "waterfall.csv").read_text()
    rep = load_report(out / "report.json")
    label = rep.discoveries[0].label
    assert main(["waterfall", "--report", str(out / "report.json"), "--vertex", label]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "vertex_label,delta,rho_i_delta,p_value"
    assert len(lines) - 1 == len(rep.discoveries[0].profile)


def test_cli_exit_codes(tmp_path, capsys):
    # p < n - 1 makes the Gram matrix of U-scores singular
    narrow = write_matrix(tmp_path, "narrow.csv", np.random.default_rng(1).standard_normal((10, 4)))
    out = str(tmp_path / "o")
    assert main(["screen", "--input", str(narrow), "--mode", "parcor", "--rho-star", "0.5", "--out", out]) == 3
    assert main(["screen", "--input", str(narrow), "--mode", "corr", "--rho-star", "0.5", "--out", out]) == 0
    missing = write(tmp_path, "m.csv", "a,b,c\n1,NA,3\n2,4,5\n3,6,9\n")
    assert main(["screen", "--input", str(missing), "--rho-star", "0.5", "--out", out]) == 2
    assert main(["screen", "--input", str(tmp_path / "nope.csv"), "--rho-star", "0.5", "--out", out]) == 2
    assert main(["waterfall", "--report", str(tmp_path / "o" / "report.json"), "--vertex", "zzz"]) == 2
    assert "hubscreen:" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["screen", "--input", str(narrow), "--rho-star", "1.5", "--out", out])
    assert exc.value.code == 2


def test_cli_calibrate(capsys):
    assert main(["calibrate", "--n", "266", "--p", "24481", "--delta-max", "1"]) == 0
    first = capsys.readouterr().out.splitlines()[0]
    value = float(first.split("(")[1].rstrip(")"))
    assert abs(value - 0.296) <= 0.005


def test_cli_calibrate_table(capsys):
    assert main(["calibrate", "--n", "40", "--p", "500", "--delta-max", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("rho_c[delta=") == 2
    rows = [l.split("\t") for l in out.splitlines() if l[:1].isdigit()]
    assert rows and all(len(r) == 5 for r in rows)


def test_cli_simulate_json(capsys):
    args = ["simulate", "--n", "10", "--p", "50", "--rho", "0.9", "--delta", "1", "--trials", "20", "--seed", "3"]
    assert main(args) == 0
    a = capsys.readouterr().out
    d = json.loads(a)
    assert d["trials"] == 20 and 0 <= d["empirical_P_N_positive"] <= 1
    assert main(args) == 0
    assert capsys.readouterr().out == a


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "hubscreen", "calibrate", "--n", "50", "--p", "100"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0 and res.stdout.startswith("rho_c[delta=1]")
    res = subprocess.run([sys.executable, "-m", "hubscreen", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2 and res.stderr


@pytest.mark.slow
def test_cli_simulate_full_scale(capsys):
    args = ["simulate", "--model", "identity", "--n", "266", "--p", "24481", "--rho", "0.26",
            "--delta", "1", "--trials", "1", "--seed", "7", "--mode", "parcor"]
    assert main(args) == 0
    d = json.loads(capsys.readouterr().out)
    assert abs(d["empirical_mean_N"] - 8531) <= 4 * math.sqrt(8531)
