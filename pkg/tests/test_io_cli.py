from __future__ import annotations

import json

import pytest

from fibergraphs import io
from fibergraphs.cli import main
from fibergraphs.enumeration import enumerate_fiber
from fibergraphs.errors import InvalidDimensionError, RowSumMismatchError


def test_parse_table_json_round_trip():
    t = io.parse_table_json('{"n": 2, "r": 2, "rows": [[1, 1], [1, 1]]}')
    assert io.parse_table_json(io.table_to_json(t)) == t


def test_parse_table_json_missing_keys():
    with pytest.raises(InvalidDimensionError) as exc:
        io.parse_table_json('{"rows": [[1]]}')
    assert "missing" in str(exc.value)


def test_parse_table_csv_infers_margin():
    t = io.parse_table_csv("2,0,0\n0,2,0\n0,0,2\n")
    assert t.n == 3 and t.r == 2


def test_parse_table_csv_positional_errors():
    with pytest.raises(InvalidDimensionError) as exc:
        io.parse_table_csv("1,x\n0,1\n")
    assert "line 1, field 2" in str(exc.value)
    with pytest.raises(RowSumMismatchError):
        io.parse_table_csv("2,0\n1,0\n")


def test_fiber_jsonl_and_csv():
    fiber = enumerate_fiber(2, 2)
    lines = io.fiber_to_jsonl(fiber).splitlines()
    assert len(lines) == 3
    assert json.loads(lines[0]) == {"id": 0, "rows": [[0, 2], [2, 0]]}
    csv = io.fiber_to_csv(fiber).splitlines()
    assert csv[0] == "id,r1c1,r1c2,r2c1,r2c2"
    assert csv[1] == "0,0,2,2,0"


def test_parse_constraints_inline_and_file(tmp_path):
    assert io.parse_constraints("[[1, 2], [2, 1]]") == [(1, 2), (2, 1)]
    path = tmp_path / "c.json"
    path.write_text("[[3, 3]]")
    assert io.parse_constraints(str(path)) == [(3, 3)]


def test_load_matrix_json(tmp_path):
    path = tmp_path / "A.json"
    path.write_text('{"rows": [[1, 1, -1], [0, 1, 1]]}')
    assert io.load_matrix_json(path) == [[1, 1, -1], [0, 1, 1]]
    path.write_text('{"rows": [[1], [1, 2]]}')
    with pytest.raises(InvalidDimensionError):
        io.load_matrix_json(path)


def test_matrix_json_feeds_general_fiber(tmp_path):
    from fibergraphs.enumeration import enumerate_general_fiber, margin_matrix

    path = tmp_path / "A.json"
    path.write_text(json.dumps({"rows": margin_matrix(2)}))
    A = io.load_matrix_json(path)
    gf = enumerate_general_fiber(A, [2, 2, 2, 2])
    assert len(gf) == 3


# --- CLI ---

def test_cli_enumerate_counts(capsys):
    assert main(["enumerate", "--n", "3", "--r", "2"]) == 0
    assert capsys.readouterr().out.strip() == "21 tables"
    assert main(["enumerate", "--n", "3", "--r", "3"]) == 0
    assert capsys.readouterr().out.strip() == "55 tables"
    assert main(["enumerate", "--n", "3", "--r", "1"]) == 0
    assert capsys.readouterr().out.strip() == "6 tables"


def test_cli_enumerate_writes_fiber(tmp_path, capsys):
    out = tmp_path / "fiber.jsonl"
    assert main(["enumerate", "--n", "2", "--r", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    assert len(out.read_text().splitlines()) == 3


def test_cli_enumerate_csv_format(tmp_path, capsys):
    out = tmp_path / "fiber.csv"
    assert main([
        "enumerate", "--n", "2", "--r", "2", "--format", "csv", "--out", str(out)
    ]) == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    assert lines[0] == "id,r1c1,r1c2,r2c1,r2c2"
    assert len(lines) == 4


def test_cli_enumerate_cap_exit_code(capsys):
    assert main(["enumerate", "--n", "3", "--r", "3", "--cap", "10"]) == 3


def test_cli_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", "--n", "3"])
    assert exc.value.code == 2


def test_cli_graph_edge_list(tmp_path, capsys):
    out = tmp_path / "g.edges"
    assert main(["graph", "--n", "2", "--r", "2", "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "3 vertices, 2 edges" in captured.err
    assert out.read_text() == "0 1\n1 2\n"
    sidecar = json.loads((tmp_path / "g.edges.vertices.json").read_text())
    assert sidecar["1"] == [[1, 1], [1, 1]]


def test_cli_graph_oriented_dot(capsys):
    assert main(["graph", "--n", "2", "--r", "2", "--format", "dot", "--oriented"]) == 0
    captured = capsys.readouterr()
    assert "digraph" in captured.out


def test_cli_verify_pass_and_fail_exit(capsys, tmp_path):
    out = tmp_path / "suite.json"
    assert main(["verify", "--n", "3", "--r", "3", "--out", str(out)]) == 0
    suite = json.loads(out.read_text())
    assert suite["pass"] is True
    assert {r["name"] for r in suite["results"]} == {
        "degrees", "connmax", "maxdeg", "commonchoices", "connectivity",
        "liu", "diameter", "sink", "dag", "konig", "decomp-constrained",
    }
    for result in suite["results"]:
        assert result["pass"] is True


def test_cli_verify_informational_below_hypothesis(capsys):
    assert main(["verify", "--n", "3", "--r", "2", "--checks", "connectivity,liu"]) == 0
    suite = json.loads(capsys.readouterr().out)
    for result in suite["results"]:
        assert result["hypothesis_met"] is False
        assert result["pass"] is True
        assert result["expected"] is None


def test_cli_verify_gates_expensive_without_long(capsys):
    assert main(["verify", "--n", "4", "--r", "3", "--checks", "connectivity"]) == 0
    suite = json.loads(capsys.readouterr().out)
    assert suite["results"][0]["skipped"] is True


def test_cli_verify_unknown_check(capsys):
    assert main(["verify", "--n", "3", "--r", "2", "--checks", "nope"]) == 2


def test_cli_verify_expected_from_formulas(capsys):
    # expected values must track (n, r), not be hard-coded
    assert main(["verify", "--n", "2", "--r", "3", "--checks", "diameter,connectivity"]) == 0
    suite = json.loads(capsys.readouterr().out)
    by_name = {r["name"]: r for r in suite["results"]}
    assert by_name["diameter"]["expected"]["diameter"] == 3
    assert by_name["connectivity"]["expected"]["kappa"] == 1


def test_cli_decompose(tmp_path, capsys):
    table = tmp_path / "j3.json"
    table.write_text('{"n": 3, "r": 3, "rows": [[1,1,1],[1,1,1],[1,1,1]]}')
    assert main(["decompose", "--table", str(table)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["constraints_satisfied"] is True
    assert len(payload["parts"]) == 3
    totals = [
        [sum(part[i][j] for part in payload["parts"]) for j in range(3)]
        for i in range(3)
    ]
    assert totals == [[1, 1, 1], [1, 1, 1], [1, 1, 1]]


def test_cli_decompose_constrained(tmp_path, capsys):
    table = tmp_path / "t.csv"
    table.write_text("1,1\n1,1\n")
    assert main(["decompose", "--table", str(table), "--constraints", "[[1,2],[2,2]]"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["parts"][0] == [[0, 1], [1, 0]]
    assert payload["constraints_satisfied"] is True


def test_cli_sample_deterministic(tmp_path, capsys):
    table = tmp_path / "d.csv"
    table.write_text("2,0,0\n0,2,0\n0,0,2\n")
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["sample", "--table", str(table), "--steps", "500", "--seed", "7"]
    assert main(args + ["--emit", str(a)]) == 0
    assert main(args + ["--emit", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 500


def test_cli_test_outputs_result(tmp_path, capsys):
    table = tmp_path / "d.csv"
    table.write_text("2,0,0\n0,2,0\n0,0,2\n")
    assert main([
        "test", "--table", str(table), "--steps", "20000",
        "--seed", "3", "--thin", "4",
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["statistic"] == "chisq"
    assert payload["observed_statistic"] == 12.0
    assert payload["samples_used"] == 5000
    assert 0.0 <= payload["p_value_estimate"] <= 1.0


def test_cli_test_margin_mismatch(tmp_path, capsys):
    table = tmp_path / "bad.csv"
    table.write_text("1,0\n0,2\n")
    assert main(["test", "--table", str(table), "--steps", "10", "--seed", "1"]) == 1


def test_cli_hemmecke(capsys):
    assert main(["hemmecke", "--k", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {
        "k": 2,
        "vertices": 8,
        "min_degree": 2,
        "kappa": 1,
        "conjecture_holds": False,
        "articulation_vertices": [0, 4],
    }


def test_cli_hemmecke_guard(capsys):
    assert main(["hemmecke", "--k", "13"]) == 3
