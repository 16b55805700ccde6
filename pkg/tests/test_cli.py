import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nonlocalbox.boxfile import bundled_path, load_box, read_table_csv
from nonlocalbox.cli import main
from nonlocalbox.reference import TABLE_IC

SQRT2 = math.sqrt(2)


def _write(tmp_path, doc, name="box.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestEval:
    def test_quantum(self, capsys):
        assert main(["eval", str(bundled_path("quantum"))]) == 0
        out = capsys.readouterr().out
        assert "CHSH = 2.828427" in out
        assert "VIOLATED" not in out

    def test_pr_json(self, capsys):
        assert main(["eval", str(bundled_path("pr")), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["chsh"] == 4.0
        assert doc["criteria"]["NS"]["satisfied"]
        assert not doc["criteria"]["IC"]["satisfied"] and not doc["criteria"]["ML"]["satisfied"]
        assert doc["criteria"]["ML"]["lhs"][0] == pytest.approx(2 * math.pi)
        assert doc["biasness_percent"]["alice0"] == 0.0

    def test_deterministic_marginal_is_reported_not_fatal(self, tmp_path, capsys):
        path = _write(tmp_path, {"format": "ns_params", "m1": 1, "m2": 0.5, "n1": 0.5, "n2": 0.5, "c": [0.5, 0.5, 0.25, 0.25]})
        assert main(["eval", path, "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert "DeterministicMarginal" in doc["criteria"]["ML"]

    def test_unnormalized_exit_2(self, tmp_path, capsys):
        path = _write(tmp_path, {"format": "full", "probabilities": [[0.275] * 4] * 4})
        assert main(["eval", path]) == 2
        assert "NormalizationViolation" in capsys.readouterr().err

    def test_tolerance_flag(self, tmp_path):
        rows = np.full((4, 4), 0.25)
        rows[0, 0] += 1e-6
        path = _write(tmp_path, {"format": "full", "probabilities": rows.tolist()})
        assert main(["eval", path]) == 2
        assert main(["eval", path, "--tolerance", "1e-5"]) == 0

    def test_parse_error_exit_1(self, tmp_path, capsys):
        path = _write(tmp_path, {"format": "equal_bias", "p": 0.5})
        assert main(["eval", path]) == 1
        assert "'c'" in capsys.readouterr().err
        assert main(["eval", str(tmp_path / "missing.json")]) == 1


class TestMaximize:
    def test_ns(self, tmp_path, capsys):
        out = tmp_path / "ns.json"
        assert main(["maximize", "--criterion", "ns", "--out", str(out)]) == 0
        assert "58.5786%" in capsys.readouterr().out
        doc = json.loads(out.read_text())
        assert doc["p_star"] == pytest.approx((3 - SQRT2) / 2, abs=1e-12)
        assert doc["method"] == "analytic"
        # the result document is itself a loadable box file
        assert load_box(out).rows()[3, 3] == pytest.approx(0.0, abs=1e-12)

    def test_infeasible(self, capsys):
        assert main(["maximize", "--criterion", "ic", "--chsh-target", "3.5"]) == 1
        assert "InfeasibleTarget" in capsys.readouterr().err

    def test_bad_target(self, capsys):
        assert main(["maximize", "--criterion", "ns", "--chsh-target", "5"]) == 1


class TestSimulate:
    def test_quantum(self, tmp_path, capsys):
        out, samples = tmp_path / "sim.json", tmp_path / "samples.csv"
        args = ["simulate", str(bundled_path("quantum")), "--pairs", "1000", "--runs", "2000", "--seed", "7"]
        assert main(args + ["--out", str(out), "--emit-samples", str(samples)]) == 0
        doc = json.loads(out.read_text())
        assert doc["theoretical_sign_chsh"] == pytest.approx(2.0, abs=1e-12)
        assert abs(doc["sign_chsh"] - 2.0) <= max(5 * doc["stderr_sign_chsh"], 0.02)
        assert len(samples.read_text().splitlines()) == 1 + 4 * 2000
        capsys.readouterr()
        assert main(args + ["--json"]) == 0
        assert json.loads(capsys.readouterr().out)["sign_chsh"] == doc["sign_chsh"]

    def test_config_error(self, capsys):
        assert main(["simulate", str(bundled_path("pr")), "--runs", "10"]) == 1
        assert "runs" in capsys.readouterr().err


@pytest.fixture(scope="module")
def reproduced(tmp_path_factory):
    out = tmp_path_factory.mktemp("repro")
    assert main(["reproduce", "--out", str(out)]) == 0
    return out


class TestReproduce:
    def test_files(self, reproduced):
        names = {p.name for p in reproduced.iterdir()}
        for stem in ("table1", "table3", "table4"):
            assert {f"{stem}.csv", f"{stem}.json"} <= names
        assert {"summary.json", "ns_result.json", "ic_result.json", "ml_result.json"} <= names

    def test_summary(self, reproduced):
        s = json.loads((reproduced / "summary.json").read_text())
        assert s["p_ns"] == pytest.approx((3 - SQRT2) / 2, abs=1e-9)
        assert s["p_ic"] == pytest.approx(0.646469, abs=5e-4)
        assert s["p_ml"] == pytest.approx(0.500226, abs=5e-4)
        assert s["ml_max_abs_distance"] < 1e-3
        assert s["ml_matches_quantum_3dp"] is True
        assert s["ic_maximizer"] in ("matches reference table", "alternative maximizer")
        assert s["ic_max_abs_distance"] == pytest.approx(0.22, abs=5e-3)

    def test_tables(self, reproduced):
        t1 = np.array(read_table_csv(reproduced / "table1.csv"))
        t3 = np.array(read_table_csv(reproduced / "table3.csv"))
        t4 = np.array(read_table_csv(reproduced / "table4.csv"))
        assert np.array_equal(np.round(t4, 3), np.round(t1, 3))
        assert t3[1, 1] == pytest.approx(0.0, abs=1e-3) and t3[1, 2] == pytest.approx(0.0, abs=1e-3)
        np.testing.assert_allclose(t3, TABLE_IC, atol=1e-3)

    def test_outputs_evaluate(self, reproduced, capsys):
        for name in ("table3.json", "table4.json", "ic_result.json", "ml_result.json"):
            assert main(["eval", str(reproduced / name), "--json"]) == 0
            doc = json.loads(capsys.readouterr().out)
            assert doc["chsh"] == pytest.approx(2 * SQRT2, abs=1e-6)
        a = load_box(reproduced / "table3.json")
        b = load_box(reproduced / "ic_result.json")
        np.testing.assert_allclose(a.prob, b.prob, atol=1e-9)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nonlocalbox", "eval", str(bundled_path("uniform"))], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "CHSH = 0.000000" in proc.stdout


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "nonlocalbox", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("eval", "maximize", "reproduce", "simulate"):
        assert cmd in proc.stdout
