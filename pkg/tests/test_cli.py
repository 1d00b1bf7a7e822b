import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from cesaro_lab.cli import (
    CSV_COLUMNS,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    ParseError,
    Report,
    RunConfig,
    coeffs_to_pairs,
    main,
    pairs_to_series,
    parse_coeffs,
)
from cesaro_lab.core import make_series

from conftest import random_series


@pytest.fixture
def coeff_file(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("# f = 1 + z/2\n1 0\n0.5\n")
    return path


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def test_parse_coeffs():
    f = parse_coeffs("1 2\n\n# comment\n3, -4  # trailing\n5\n")
    np.testing.assert_array_equal(f.coeffs, [1 + 2j, 3 - 4j, 5])


@pytest.mark.parametrize("text,lineno", [("", None), ("# only\n", None), ("1 2 3\n", 1),
                                         ("1\nx\n", 2), ("nan 0\n", 1)])
def test_parse_errors(text, lineno):
    with pytest.raises(ParseError) as exc:
        parse_coeffs(text)
    assert exc.value.lineno == lineno


def test_pairs_round_trip_bit_for_bit(rng):
    f = random_series(rng, 50)
    back = pairs_to_series(json.loads(json.dumps(coeffs_to_pairs(f))))
    assert back.coeffs.tobytes() == f.coeffs.tobytes()


def test_apply_json(coeff_file, tmp_path):
    code, text = run(["apply", str(coeff_file), "--kernel", "cesaro,c0,shift", "--t", "0.5",
                      "--degree", "16"], tmp_path)
    assert code == EXIT_OK
    doc = json.loads(text)
    res = {r["kernel"]: r for r in doc["results"]}
    y = pairs_to_series(res["cesaro"]["coeffs"])
    assert y[0] == 1 and y[1] == pytest.approx(0.5) and y[2] == pytest.approx((0.25 + 0.25) / 3)
    assert res["c0"]["t"] is None and pairs_to_series(res["c0"]["coeffs"])[1] == 0.25
    assert res["shift"]["degree"] == 17
    assert doc["config"]["kernels"] == ["cesaro", "c0", "shift"]


def test_apply_csv(coeff_file, tmp_path):
    code, text = run(["apply", str(coeff_file), "--kernel", "c1", "--degree", "16",
                      "--format", "csv"], tmp_path)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows[0] == {"kernel": "c1", "t": "", "n": "0", "re": "1.0", "im": "0.0"}
    assert len(rows) == 17


def test_apply_volterra_without_symbol_matches_cesaro(coeff_file, tmp_path):
    _, text = run(["apply", str(coeff_file), "--kernel", "vg,cesaro,tg,st", "--t", "0,0.5",
                   "--degree", "32"], tmp_path)
    res = {(r["kernel"], r["t"]): pairs_to_series(r["coeffs"]) for r in json.loads(text)["results"]}
    for t in (0.0, 0.5):
        np.testing.assert_allclose(res["vg", t].coeffs, res["cesaro", t].coeffs, atol=1e-15)
        np.testing.assert_allclose(res["tg", t].coeffs, res["st", t].coeffs[:33], atol=1e-15)


def test_apply_with_symbol_file(coeff_file, tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("0\n1\n")
    _, text = run(["apply", str(coeff_file), "--kernel", "tg", "--g", str(g), "--degree", "16"], tmp_path)
    y = pairs_to_series(json.loads(text)["results"][0]["coeffs"])
    assert y[0] == 0 and y[1] == 1 and y[2] == 0.25


def test_empty_input_is_usage_error(tmp_path, capsys):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code, _ = run(["apply", str(empty)], tmp_path)
    assert code == EXIT_USAGE
    assert "no coefficients" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["norms", "--t", "1.0"],
    ["norms", "--degree", "4"],
    ["apply", "missing-file.txt"],
])
def test_usage_errors(argv, tmp_path):
    assert run(argv, tmp_path)[0] == EXIT_USAGE


def test_argparse_rejects_bad_p():
    with pytest.raises(SystemExit) as exc:
        main(["norms", "--p", "0.5"])
    assert exc.value.code == 2


def test_unknown_kernel(coeff_file, tmp_path):
    assert run(["apply", str(coeff_file), "--kernel", "bogus"], tmp_path)[0] == EXIT_USAGE


@pytest.mark.parametrize("command", ["norms", "spectrum", "ergodic"])
def test_reports_pass(command, tmp_path):
    code, text = run([command, "--t", "0,0.5", "--degree", "128"], tmp_path)
    doc = json.loads(text)
    assert code == EXIT_OK and doc["passed"] and doc["failed"] == 0
    assert doc["rows"] and all(set(r) == set(doc["rows"][0]) for r in doc["rows"])
    for r in doc["rows"]:
        if r["pass"] is not None:
            assert {"lhs", "rhs", "tol", "relation"} <= set(r)


def test_all_is_deterministic_apart_from_timestamp(tmp_path):
    argv = ["all", "--t", "0.3", "--p", "2,inf", "--degree", "64", "--seed", "7"]
    a = json.loads(run(argv, tmp_path, "a")[1])
    b = json.loads(run(argv, tmp_path, "b")[1])
    a.pop("timestamp"), b.pop("timestamp")
    assert a == b
    assert a["config"]["seed"] == 7 and a["config"]["p_values"] == [2.0, "inf"]


def test_csv_header(tmp_path):
    code, text = run(["ergodic", "--t", "0.5", "--degree", "64", "--format", "csv"], tmp_path)
    assert code == EXIT_OK
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_failed_check_sets_exit_code(tmp_path, monkeypatch):
    import cesaro_lab.cli as cli

    def broken(config, report):
        report.check("broken", 2.0, 1.0)

    monkeypatch.setitem(cli._RUNNERS, "norms", (broken,))
    code, text = run(["norms"], tmp_path)
    assert code == EXIT_FAIL and json.loads(text)["failed"] == 1


def test_report_relations():
    rep = Report(RunConfig("norms", [0.5], [2.0], 64))
    assert rep.check("a", 1.0, 1.0, relation="<=")
    assert not rep.check("b", 1.0, 1.0, relation="<")
    assert rep.check("c", 1.0, 1.0 + 1e-13, tol=1e-12, relation="==")
    assert len(rep.failures) == 1


def test_degree_capped_by_env(coeff_file, tmp_path, monkeypatch, caplog):
    monkeypatch.setenv("CESARO_LAB_MAX_DEGREE", "32")
    _, text = run(["apply", str(coeff_file), "--degree", "100"], tmp_path)
    doc = json.loads(text)
    assert doc["config"]["degree"] == 32 and doc["config"]["max_degree"] == 32
    assert doc["results"][0]["degree"] == 32
    assert "capped" in caplog.text


def test_module_entry_point(coeff_file):
    out = subprocess.run([sys.executable, "-m", "cesaro_lab", "apply", str(coeff_file),
                          "--degree", "16", "--format", "csv"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("kernel,t,n,re,im")
