import csv
import io
import json
import math

import jsonschema
import pytest

from khinlab.cli import main, read_coefficients
from khinlab.errors import ParseError
from khinlab.schema import SCHEMAS

S08 = {"independent": {"atoms": [{"value": "1", "prob": "0.8"}, {"value": "0", "prob": "0.2"}]}}
UNIT = {"independent": {"atoms": [{"value": "1", "prob": "1"}]}}
COUNTER = {"sign_function": {"k": 2, "values": ["1", "0", "0", "1"]}}


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)
    return _write


def run_json(capsys, argv, code=0):
    assert main(argv) == code
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema_version"] == 1
    jsonschema.validate(doc, SCHEMAS[doc["kind"]])
    return doc


class TestMoments:
    def test_exact_unit_pair(self, capsys, write):
        doc = run_json(capsys, ["moments", write("x.json", '["1", "1"]'), "--p", "1", "--exact"])
        (rep,) = doc["reports"]
        assert rep["norm"] == 1.0 and rep["method"] == "exact"
        assert doc["coefficients"] == ["1", "1"]

    def test_zero_vector(self, capsys, write):
        doc = run_json(capsys, ["moments", write("x.json", "[0, 0]"), "--p", "2"])
        assert doc["reports"][0]["absolute_moment"] == 0.0

    def test_several_exponents_and_weight(self, capsys, write):
        doc = run_json(capsys, ["moments", write("x.txt", "0.6\n0.8  # second\n"), "--p", "1,2",
                                "--p", "4", "--weight", write("w.json", S08)])
        assert [r["p_text"] for r in doc["reports"]] == ["1", "2", "4"]
        assert doc["reports"][2]["absolute_moment"] == pytest.approx(0.8 * 1.9216, rel=1e-14)
        assert doc["weight"] == S08

    def test_decimal_text_is_echoed(self, capsys, write):
        doc = run_json(capsys, ["moments", write("x.json", '["1.50", "-0.250"]'), "--p", "2.50"])
        assert doc["coefficients"] == ["1.50", "-0.250"]
        assert doc["reports"][0]["p_text"] == "2.50"

    def test_monte_carlo_is_reproducible(self, capsys, write):
        argv = ["moments", write("x.json", '["0.6", "0.8"]'), "--p", "4", "--mc",
                "--samples", "20000", "--seed", "3"]
        first = run_json(capsys, argv)
        second = run_json(capsys, argv)
        assert first == second
        rep = first["reports"][0]
        assert rep["ci_kind"] == "normal-approximation" and rep["sample_count"] == 20000
        assert abs(rep["absolute_moment"] - 1.9216) <= 5 * rep["standard_error"]

    def test_too_long_for_exact(self, capsys, write):
        assert main(["moments", write("x.json", json.dumps(["1"] * 30)), "--p", "1", "--exact"]) == 3

    def test_env_cap(self, capsys, write, monkeypatch):
        monkeypatch.setenv("KHINLAB_NMAX", "4")
        assert main(["moments", write("x.json", json.dumps(["1"] * 5)), "--p", "1"]) == 3

    @pytest.mark.parametrize("content, flags", [
        ("[1, 2", ["--p", "1"]),
        ('[{"a": 1}]', ["--p", "1"]),
        ("1\nabc\n", ["--p", "1"]),
        ('["1"]', ["--p", "1", "--samples", "10"]),
        ('["1"]', ["--p", "0"]),
    ])
    def test_parse_errors(self, capsys, write, content, flags):
        assert main(["moments", write("x.json", content), *flags]) == 2
        assert "khinlab:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["moments", str(tmp_path / "nope.json"), "--p", "1"]) == 2

    def test_csv_and_human(self, capsys, write):
        x = write("x.json", '["1", "1"]')
        assert main(["moments", x, "--p", "1,2", "--format", "csv"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [r["p_text"] for r in rows] == ["1", "2"]
        assert float(rows[1]["absolute_moment"]) == 2.0
        assert main(["moments", x, "--p", "1", "--format", "human"]) == 0
        assert "absolute_moment" in capsys.readouterr().out


class TestConstants:
    def test_b4(self, capsys):
        doc = run_json(capsys, ["constants", "--q", "4"])
        assert doc["values"]["B_q"] == "1.31607401295"

    def test_zero_mass(self, capsys):
        doc = run_json(capsys, ["constants", "--zero-mass"])
        assert doc["values"]["1-2e^(-2+gamma)"].startswith("0.517")
        assert doc["values"]["1-2e^(-2+gamma)"] == "0.517916119693"

    def test_default_is_zero_mass(self, capsys):
        assert run_json(capsys, ["constants"])["quantity"] == "zero_mass"

    def test_limit_check(self, capsys):
        doc = run_json(capsys, ["constants", "--limit-check"])
        assert float(doc["values"]["abs_diff"]) <= 1e-3

    def test_beta(self, capsys):
        doc = run_json(capsys, ["constants", "--beta", "0.5"])
        assert float(doc["values"]["beta"]) == pytest.approx(0.187519491216, rel=1e-10)
        assert doc["values"]["classic"] == "0.1875"

    @pytest.mark.parametrize("q", ["1.5", "abc"])
    def test_bad_q(self, q):
        assert main(["constants", "--q", q]) == 2


class TestExtract:
    def test_worked_example(self, capsys, write):
        doc = run_json(capsys, ["extract", "--weight", write("w.json", S08), "--p", "1", "--q", "4",
                                "--mode", "classic"])
        rep = doc["report"]
        assert rep["t"] == 30 and rep["L"] == pytest.approx(0.0108306565410968775, rel=1e-12)
        assert rep["p_text"] == "1" and rep["q_text"] == "4"

    def test_unit_weight(self, capsys, write):
        doc = run_json(capsys, ["extract", "--weight", write("w.json", UNIT), "--p", "2", "--q", "4"])
        assert doc["report"]["s"] == 1

    @pytest.mark.parametrize("mode, shown", [("classic", "0.666666666667"), ("refined", "0.517916119693")])
    def test_counterexample_weight(self, capsys, write, mode, shown):
        assert main(["extract", "--weight", write("w.json", COUNTER), "--p", "1", "--q", "3",
                     "--mode", mode]) == 4
        assert shown in capsys.readouterr().err

    def test_malformed_weight(self, write):
        bad = {"independent": {"atoms": [{"value": "1", "prob": "0.3"}]}}
        assert main(["extract", "--weight", write("w.json", bad), "--p", "1", "--q", "4"]) == 2

    def test_p_not_below_q(self, write):
        assert main(["extract", "--weight", write("w.json", S08), "--p", "4", "--q", "4"]) == 2


class TestVerify:
    def test_fourth_moment(self, capsys):
        doc = run_json(capsys, ["verify", "--suite", "fourth-moment", "--cases", "200", "--seed", "1"])
        assert doc["report"]["pass_count"] == 200

    def test_sandwich_to_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["verify", "--suite", "sandwich", "--cases", "100", "--seed", "7", "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        doc = json.loads(out.read_text())
        jsonschema.validate(doc, SCHEMAS["verify"])
        assert doc["report"]["pass_count"] == 100

    def test_unknown_suite(self, capsys):
        assert main(["verify", "--suite", "bogus"]) == 2

    def test_failures_exit_one(self, capsys, monkeypatch):
        import khinlab.verifier as v
        monkeypatch.setattr(v, "FOURTH_MOMENT_RTOL", -0.9)
        doc = run_json(capsys, ["verify", "--suite", "fourth-moment", "--cases", "3"], code=1)
        assert len(doc["report"]["failures"]) == 3

    def test_csv_row(self, capsys):
        assert main(["verify", "--suite", "zero-mass", "--cases", "5", "--format", "csv"]) == 0
        (row,) = csv.DictReader(io.StringIO(capsys.readouterr().out))
        assert row["pass_count"] == "5" and row["failure_count"] == "0"


def test_counterexample(capsys):
    doc = run_json(capsys, ["counterexample"])
    rep = doc["report"]
    assert rep["norms"]["1"] == 0.0 and rep["exact_zero"]
    assert rep["coefficient_norm"] == math.sqrt(2)


def test_usage_error():
    assert main([]) == 2
    assert main(["moments"]) == 2


def test_read_coefficients_rejects_non_numbers(write):
    with pytest.raises(ParseError):
        read_coefficients(write("x.json", '[true]'))


def test_module_entry_point():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "khinlab", "constants", "--q", "4", "--format", "human"],
                         capture_output=True, text=True, check=True).stdout
    assert "1.31607401295" in out
