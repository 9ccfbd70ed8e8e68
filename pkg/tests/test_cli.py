import json

import pytest

from subsetflow import space_to_json
from subsetflow.cli import main


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_retract_line_pair(capsys):
    rc, out, err = run_cli(capsys, "retract", "--space", "euclidean:1",
                           "--set", "[[0.0],[1.0]]", "--n", "2")
    assert rc == 0 and err == ""
    report = json.loads(out)
    assert report["output"]["points"] == [[0.5]]
    assert report["merge_time_used"] == 0.5
    assert report["output_cardinality"] == 1


def test_retract_tree_space_file(capsys, tmp_path, star_tree):
    space_path = tmp_path / "star.json"
    space_path.write_text(json.dumps(space_to_json(star_tree)))
    rc, out, _ = run_cli(capsys, "retract", "--space-file", str(space_path),
                         "--set", '[{"edge": 0, "offset": 0.4}, {"edge": 1, "offset": 0.3}]',
                         "--n", "2")
    assert rc == 0
    report = json.loads(out)
    (pt,) = report["output"]["points"]
    assert pt["edge"] == 0
    assert pt["offset"] == pytest.approx(0.05, abs=1e-12)
    assert report["merge_time_used"] == pytest.approx(0.35, rel=1e-9)


def test_tree_requires_space_file(capsys):
    rc, _, err = run_cli(capsys, "retract", "--space", "tree:1",
                         "--set", "[[0, 0.1]]", "--n", "2")
    assert rc == 1
    assert "--space-file" in err


def test_flow_with_trace(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    rc, out, _ = run_cli(capsys, "flow", "--space", "euclidean:1",
                         "--set", "[[0.0],[1.0]]", "--time", "0.3",
                         "--k", "4", "--trace-csv", str(trace))
    assert rc == 0
    report = json.loads(out)
    assert report["converged"] is True
    assert [c[0] for c in report["final"]["coords"]] == pytest.approx([0.3, 0.7], abs=1e-12)
    lines = trace.read_text().splitlines()
    assert lines[0] == "time,delta,F"
    assert len(lines) > 2


def test_flow_requires_time(capsys):
    rc, _, err = run_cli(capsys, "flow", "--space", "euclidean:1",
                         "--set", "[[0.0],[1.0]]")
    assert rc == 1
    assert "--time" in err


def test_merge_time_fields(capsys):
    rc, out, _ = run_cli(capsys, "merge-time", "--space", "euclidean:1",
                         "--set", "[[0.0],[1.0]]")
    assert rc == 0
    report = json.loads(out)
    assert set(report) == {"input", "t_star", "merged"}
    assert report["t_star"] == 0.5
    assert report["merged"]["coords"] == [[0.5], [0.5]]


def test_verify_small_passes(capsys):
    rc, out, _ = run_cli(capsys, "verify", "--space", "euclidean:2",
                         "--n", "2", "--samples", "2", "--seed", "1")
    assert rc == 0
    report = json.loads(out)
    assert report["overall_pass"] is True
    assert all(row["pass"] for row in report["checks"])


def test_verify_csv_sidecar(capsys, tmp_path):
    csv_path = tmp_path / "rows.csv"
    rc, _, _ = run_cli(capsys, "scan", "--space", "euclidean:2", "--n", "2",
                       "--samples", "4", "--csv", str(csv_path))
    assert rc == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "name,trials,worst,threshold,pass"
    assert lines[1].startswith("lipschitz_ratio,")


def test_convergence_honest_failure(capsys):
    # at an intermediate time the doubling distances decay like 1/k, far
    # from the 1e-7 target with this little budget; the report must say so
    rc, out, _ = run_cli(capsys, "convergence", "--space", "euclidean:2",
                         "--n", "3", "--samples", "2", "--seed", "5",
                         "--time", "0.5", "--k", "8", "--max-doublings", "2")
    assert rc == 2
    report = json.loads(out)
    by_name = {row["name"]: row for row in report["checks"]}
    assert by_name["cauchy_reaches_tolerance"]["pass"] is False
    assert report["overall_pass"] is False


def test_reports_are_byte_identical(capsys, tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    argv = ["verify", "--space", "euclidean:2", "--n", "2", "--samples", "3",
            "--seed", "9"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()


def test_stdout_matches_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    rc, out, _ = run_cli(capsys, "merge-time", "--space", "euclidean:1",
                         "--set", "[[0.0],[2.0]]")
    assert rc == 0
    assert main(["merge-time", "--space", "euclidean:1", "--set", "[[0.0],[2.0]]",
                 "--out", str(path)]) == 0
    capsys.readouterr()
    assert path.read_text() == out


def test_empty_set_rejected(capsys):
    rc, _, err = run_cli(capsys, "retract", "--space", "euclidean:1",
                         "--set", "[]", "--n", "2")
    assert rc == 1
    assert "empty set" in err


def test_bad_inline_json(capsys):
    rc, _, err = run_cli(capsys, "retract", "--space", "euclidean:1",
                         "--set", "[[", "--n", "2")
    assert rc == 1
    assert "not valid JSON" in err


def test_set_and_input_conflict(capsys, tmp_path):
    payload = tmp_path / "in.json"
    payload.write_text("[[0.0]]")
    rc, _, err = run_cli(capsys, "retract", "--space", "euclidean:1",
                         "--set", "[[0.0]]", "--input", str(payload), "--n", "2")
    assert rc == 1
    assert "not both" in err


def test_space_and_space_file_conflict(capsys, tmp_path, star_tree):
    space_path = tmp_path / "star.json"
    space_path.write_text(json.dumps(space_to_json(star_tree)))
    rc, _, err = run_cli(capsys, "retract", "--space", "euclidean:1",
                         "--space-file", str(space_path),
                         "--set", "[[0.0],[1.0]]", "--n", "2")
    assert rc == 1
    assert "not both" in err


def test_input_file_payload(capsys, tmp_path):
    payload = {"space": {"kind": "euclidean", "dim": 1},
               "points": [[0.0], [1.0], [10.0]]}
    path = tmp_path / "in.json"
    path.write_text(json.dumps(payload))
    rc, out, _ = run_cli(capsys, "retract", "--input", str(path), "--n", "3")
    assert rc == 0
    report = json.loads(out)
    got = [v for (v,) in report["output"]["points"]]
    assert got == pytest.approx([1.0, 9.0], abs=1e-12)


def test_input_file_missing_field(capsys, tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps({"space": {"kind": "euclidean", "dim": 1}}))
    rc, _, err = run_cli(capsys, "retract", "--input", str(path), "--n", "2")
    assert rc == 1
    assert "points" in err


def test_missing_input_file(capsys):
    rc, _, err = run_cli(capsys, "retract", "--input", "/nonexistent/in.json", "--n", "2")
    assert rc == 1
    assert err.startswith("error:")


def test_unknown_command(capsys):
    assert main(["frobnicate"]) == 1


def test_usage_error_is_exit_one(capsys):
    # argparse would exit 2, but 2 is reserved for failed verification
    assert main(["retract", "--space"]) == 1


def test_help_is_exit_zero(capsys):
    assert main(["--help"]) == 0
    assert main(["retract", "--help"]) == 0
