"""
Tests for the pysoac command line: exit codes, printed reports and the
files written by `solve`.
"""

import json

import pytest

from pysoac.cli import EXIT_INPUT_ERROR, EXIT_NO_SOLUTION, EXIT_OK, main
from pysoac.model_dsl import random_instance
from pysoac.mps_io import parse_sol, read_mps_file
from pysoac.verify import check_solution_file

from .conftest import ERROR_MPS, GOLDEN_MPS, TEST_DATA_DIR, model_to_mps

TOY_MPS = """NAME toy
ROWS
 N obj
 L c1
COLUMNS
 x1 obj -1 c1 1
 x2 obj -1 c1 1
RHS
 RHS c1 1
BOUNDS
 BV BND x1
 BV BND x2
ENDATA
"""

INFEASIBLE_MPS = """NAME infeasible
ROWS
 N obj
 L low
 G high
COLUMNS
 x1 obj 1 low 1
 x1 high 1
RHS
 RHS high 1
BOUNDS
 BV BND x1
ENDATA
"""


def _values(output):
    pairs = {}
    for line in output.splitlines():
        if " : " in line:
            key, value = line.split(" : ", 1)
            pairs[key.strip()] = value.strip()
    return pairs


@pytest.mark.cli
class TestSolveCommand:

    def test_toy_model(self, temp_file, tmp_path, capsys):
        model_path = temp_file(TOY_MPS)
        out = tmp_path / "toy.sol"
        report = tmp_path / "report.json"

        code = main(["solve", model_path, "--steps", "2000", "--out", str(out), "--report", str(report)])

        assert code == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert values["objective"] == "-1"
        assert values["gap"] == "1"
        assert values["status"] == "feasible"
        sol = parse_sol(out.read_text())
        assert sol.declared_objective == -1.0
        assert check_solution_file(read_mps_file(model_path), sol).feasible
        payload = json.loads(report.read_text())
        assert payload["best"]["objective_value"] == -1.0
        assert payload["config"]["step_limit"] == 2000

    def test_default_solution_path(self, temp_file, tmp_path, monkeypatch):
        model_path = temp_file(TOY_MPS)
        monkeypatch.chdir(tmp_path)

        assert main(["solve", model_path, "--steps", "500"]) == EXIT_OK
        assert (tmp_path / "toy.sol").exists()

    def test_infeasible_model(self, temp_file, tmp_path, capsys):
        model_path = temp_file(INFEASIBLE_MPS)
        out = tmp_path / "none.sol"

        code = main(["solve", model_path, "--time-limit", "1", "--out", str(out)])

        assert code == EXIT_NO_SOLUTION
        assert not out.exists()
        assert _values(capsys.readouterr().out)["status"] == "no feasible solution"

    def test_checkpoints_and_trace(self, temp_file, tmp_path, capsys):
        model_path = temp_file(TOY_MPS)
        trace = tmp_path / "trace.csv"

        code = main(["solve", model_path, "--steps", "1000", "--out", str(tmp_path / "t.sol"),
                     "--checkpoint", "0", "--checkpoint", "100", "--trace", str(trace), "--trace-stride", "50"])

        assert code == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert values["objective@0"] == "-"
        assert values["objective@100"] == "-1"
        rows = trace.read_text().splitlines()
        assert rows[0] == "t,max_violation,n_violated_gates,objective_of_readout"
        assert len(rows) == 1 + 1000 // 50

    def test_step_mode_is_reproducible(self, temp_file, tmp_path):
        model = random_instance(15, 8, seed=42)
        model_path = temp_file(model_to_mps(model))
        first, second = tmp_path / "a.sol", tmp_path / "b.sol"

        codes = [main(["solve", model_path, "--steps", "3000", "--seed", "7", "--out", str(out)])
                 for out in (first, second)]

        if codes[0] == EXIT_OK:
            assert first.read_bytes() == second.read_bytes()
        assert codes[0] == codes[1]

    def test_parse_error_exit_code(self, capsys):
        path, line_no, fragment = ERROR_MPS['error_ranges']
        assert main(["solve", str(path), "--steps", "10"]) == EXIT_INPUT_ERROR
        assert f"line {line_no}: {fragment}" in capsys.readouterr().out

    def test_missing_file(self, tmp_path):
        assert main(["solve", str(tmp_path / "absent.mps"), "--steps", "10"]) == EXIT_INPUT_ERROR

    def test_undecodable_model(self, tmp_path, capsys):
        path = tmp_path / "latin1.mps"
        path.write_bytes(TOY_MPS.replace("x1", "x\xe9").encode("latin-1"))
        assert main(["solve", str(path), "--steps", "10"]) == EXIT_INPUT_ERROR
        assert "not valid text" in capsys.readouterr().out

    def test_zero_jobs_rejected(self, temp_file):
        assert main(["solve", temp_file(TOY_MPS), "--steps", "100", "--jobs", "0"]) == EXIT_INPUT_ERROR


@pytest.mark.cli
class TestCheckCommand:

    def test_feasible_solution(self, capsys):
        code = main(["check", str(GOLDEN_MPS['fixed_marker']), str(TEST_DATA_DIR / 'fixed_marker.sol')])

        assert code == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert values["feasible"] == "yes"
        assert values["objective"] == "-5"
        assert values["objective_matches"] == "yes"

    def test_violated_solution(self, capsys):
        code = main(["check", str(GOLDEN_MPS['fixed_marker']), str(TEST_DATA_DIR / 'fixed_marker_bad.sol')])

        assert code == EXIT_NO_SOLUTION
        assert _values(capsys.readouterr().out)["violated_rows"] == "cap"

    def test_unknown_variable(self, temp_file):
        sol_path = temp_file("a 1\nzzz 1\n", suffix=".sol")
        assert main(["check", str(GOLDEN_MPS['fixed_marker']), sol_path]) == EXIT_INPUT_ERROR

    @pytest.mark.parametrize("value", ["nan", "inf", "-inf"])
    def test_non_finite_value(self, value, temp_file, capsys):
        sol_path = temp_file(f"a {value}\nb 1\nc 0\n", suffix=".sol")
        assert main(["check", str(GOLDEN_MPS['fixed_marker']), sol_path]) == EXIT_INPUT_ERROR
        assert "line 1: value" in capsys.readouterr().out

    def test_gap_against_lower_bound(self, capsys):
        code = main(["check", str(GOLDEN_MPS['fixed_marker']), str(TEST_DATA_DIR / 'fixed_marker.sol'),
                     "--lb", "-9"])
        assert code == EXIT_OK
        assert _values(capsys.readouterr().out)["gap"] == "0.8"


@pytest.mark.cli
class TestOracleCommand:

    def test_optimum(self, capsys):
        assert main(["oracle", str(GOLDEN_MPS['fixed_marker'])]) == EXIT_OK
        values = _values(capsys.readouterr().out)
        assert values["optimum"] == "-5"
        assert values["feasible_count"] == "3"
        assert values["enumerated"] == "8"

    def test_infeasible(self, temp_file, capsys):
        assert main(["oracle", temp_file(INFEASIBLE_MPS)]) == EXIT_NO_SOLUTION
        assert "infeasible" in capsys.readouterr().out

    def test_undecodable_model(self, tmp_path):
        path = tmp_path / "bad.mps"
        path.write_bytes(b"NAME bad\nROWS\n N \xff\xfe\n")
        assert main(["oracle", str(path)]) == EXIT_INPUT_ERROR

    def test_zero_jobs_rejected(self):
        assert main(["oracle", str(GOLDEN_MPS['fixed_marker']), "--jobs", "0"]) == EXIT_INPUT_ERROR

    def test_variable_limit(self):
        assert main(["oracle", str(GOLDEN_MPS['fixed_marker']), "--max-vars", "2"]) == EXIT_INPUT_ERROR


@pytest.mark.cli
class TestGapCommand:

    @pytest.mark.parametrize("best,lb,text", [("100", "75", "0.25"), ("5", "5", "0")])
    def test_values(self, best, lb, text, capsys):
        assert main(["gap", "--best", best, "--lb", lb]) == EXIT_OK
        assert capsys.readouterr().out.splitlines() == [text]

    def test_negative_objective_flagged(self, capsys):
        assert main(["gap", "--best", "-4208.27", "--lb", "-4283.04"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "0.01777"
        assert "negative objective" in lines[1]

    def test_zero_best(self):
        assert main(["gap", "--best", "0", "--lb", "-1"]) == EXIT_INPUT_ERROR


@pytest.mark.cli
class TestArguments:

    def test_help_lists_defaults(self, capsys):
        assert main(["solve", "--help"]) == EXIT_OK
        out = capsys.readouterr().out
        for flag in ("--time-limit", "--replicas", "--seed", "--tol", "--steps", "--out", "--checkpoint"):
            assert flag in out
        assert "default: 300.0" in out

    def test_unknown_command(self):
        assert main(["bogus"]) == EXIT_INPUT_ERROR

    def test_missing_required_flag(self):
        assert main(["gap", "--best", "1"]) == EXIT_INPUT_ERROR
