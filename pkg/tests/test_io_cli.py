import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from vecdual import cli
from vecdual.cone_order import PolyhedralCone
from vecdual.io import SchemaError, dumps, emit_front_csv, eval_expr, load_scenario, parse_grid
from vecdual.weak_sets import wsup

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCENARIOS = os.path.join(ROOT, "scenarios")
FAST = ["toy_dual.json", "toy_farkas.json", "toy_representation.json", "scalar_a2.json",
        "properties_seed42.json"]


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


class TestExpressions:
    def test_arithmetic(self):
        X = np.array([[1.0, 2.0], [3.0, -1.0]])
        assert np.allclose(eval_expr("x0**2 + abs(x1) - 1", X), [2.0, 9.0])
        assert np.allclose(eval_expr("maximum(x, 0) * pi", X), [np.pi, 3 * np.pi])
        assert np.allclose(eval_expr("2", X), [2.0, 2.0])

    @pytest.mark.parametrize("expr", ["__import__('os')", "x.real", "[x]", "open('f')", "y + 1"])
    def test_rejects_other_code(self, expr):
        with pytest.raises((ValueError, SyntaxError)):
            eval_expr(expr, np.zeros((1, 1)))

    def test_grid_forms(self):
        assert np.allclose(parse_grid({"lo": 0, "hi": 1, "step": 0.25}), [0, 0.25, 0.5, 0.75, 1])
        assert parse_grid({"axes": [[0, 1], [0, 1, 2]]}).shape == (6, 2)
        with pytest.raises(SchemaError):
            parse_grid({"lo": 1, "hi": 0, "step": 0.1})


class TestCSV:
    def test_minus_boundary_lattice(self, tmp_path):
        U = wsup([[0, 0]], PolyhedralCone.orthant(2))
        path = tmp_path / "f.csv"
        n = emit_front_csv(U, [[-2, 2], [-2, 2]], 0.1, str(path))
        rows = list(csv.reader(open(path)))
        assert n == 41 * 41 and len(rows) == 41 * 41 + 1
        assert rows[0] == ["y0", "y1", "label"]
        labels = {tuple(r[:2]): r[2] for r in rows[1:]}
        assert labels[("-1", "-1")] == "Below" and labels[("0", "-0.5")] == "On"
        assert labels[("1", "1")] == "Above"
        assert b"\r" not in path.read_bytes()

    def test_empty_window_header_only(self, tmp_path):
        U = wsup([[0, 0]], PolyhedralCone.orthant(2))
        path = tmp_path / "e.csv"
        assert emit_front_csv(U, [[1, 0], [0, 1]], 0.1, str(path)) == 0
        assert path.read_text() == "y0,y1,label\n"

    def test_json_nonfinite(self):
        assert json.loads(dumps({"b": np.inf, "a": [np.float64(-np.inf), np.nan]})) == \
            {"a": ["-inf", "nan"], "b": "inf"}


class TestScenarioValidation:
    @pytest.mark.parametrize("name", sorted(os.listdir(SCENARIOS)))
    def test_bundled_scenarios_validate(self, name):
        sc = load_scenario(os.path.join(SCENARIOS, name))
        assert sc["name"] and sc["task"]

    @pytest.mark.parametrize("obj, path", [
        ({"task": "dual"}, "$.name"),
        ({"name": "x", "task": "nope"}, "$.task"),
        ({"name": "x", "task": "dual", "seed": -1}, "$.seed"),
        ({"name": "x", "task": "dual"}, "$.instance"),
        ({"name": "x", "task": "a2", "instance": {}}, "$.instance.pieces"),
    ])
    def test_schema_errors(self, tmp_path, obj, path):
        with pytest.raises(SchemaError) as exc:
            load_scenario(write(tmp_path, "s.json", obj))
        assert exc.value.path == path


class TestExitCodes:
    def test_check_ok(self):
        assert cli.main(["check", "--scenario", os.path.join(SCENARIOS, "toy_dual.json")]) == 0

    def test_malformed_json(self, tmp_path, capsys):
        code = cli.main(["check", "--scenario", write(tmp_path, "bad.json", '{"name": ')])
        assert code == 3
        diag = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert diag["error"] == "malformed JSON" and diag["line"] == 1

    def test_missing_file(self, tmp_path, capsys):
        assert cli.main(["run", "--scenario", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 3
        assert json.loads(capsys.readouterr().err.strip())["error"] == "io"

    def test_schema_error(self, tmp_path, capsys):
        code = cli.main(["check", "--scenario", write(tmp_path, "s.json", {"name": "x", "task": "zzz"})])
        assert code == 3
        assert json.loads(capsys.readouterr().err.strip())["path"] == "$.task"

    def test_failed_check_exit_code(self, tmp_path):
        sc = json.load(open(os.path.join(SCENARIOS, "scalar_a2.json")))
        sc["tolerances"] = {"value": -1.0}  # no dual value can be within a negative tolerance
        code = cli.main(["run", "--scenario", write(tmp_path, "s.json", sc), "--out", str(tmp_path), "--quiet"])
        assert code == 2

    def test_module_entry_point(self, tmp_path):
        out = subprocess.run([sys.executable, "-m", "vecdual", "check", "--scenario",
                              os.path.join(SCENARIOS, "scalar_a2.json")], capture_output=True, text=True)
        assert out.returncode == 0


class TestRuns:
    @pytest.mark.parametrize("name", FAST)
    def test_scenario_passes_and_is_deterministic(self, tmp_path, name):
        path = os.path.join(SCENARIOS, name)
        outs = []
        for d in ("a", "b"):
            out = tmp_path / d
            assert cli.main(["run", "--scenario", path, "--out", str(out), "--quiet"]) == 0
            outs.append({f: (out / f).read_bytes() for f in sorted(os.listdir(out))})
        assert outs[0] == outs[1]
        report = json.loads(next(v for k, v in outs[0].items() if k.endswith("_report.json")))
        assert report["passed"] and "tolerances" in report and "time" not in json.dumps(report)

    def test_seed_override(self, tmp_path):
        path = os.path.join(SCENARIOS, "properties_seed42.json")
        assert cli.main(["run", "--scenario", path, "--out", str(tmp_path), "--seed", "7", "--quiet"]) == 0
        assert json.load(open(tmp_path / "properties_seed42_report.json"))["seed"] == 7
