import json
import subprocess
import sys

import numpy as np
import pytest

from lorentz_monogamy.cli import invariants_summary, main, parse_state
from lorentz_monogamy.errors import InvalidStateFile
from lorentz_monogamy.states import ghz, w3


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_state(tmp_path, capsys, *gen_args, name="state.json"):
    path = tmp_path / name
    assert run(capsys, "gen", *gen_args, "--out", str(path))[0] == 0
    return path


def test_gen_is_deterministic(tmp_path, capsys):
    a = run(capsys, "gen", "haar", "--n", "3", "--seed", "4")[1]
    b = run(capsys, "gen", "haar", "--n", "3", "--seed", "4")[1]
    c = run(capsys, "gen", "haar", "--n", "3", "--seed", "5")[1]
    assert a == b != c
    doc = json.loads(run(capsys, "gen", "ginibre", "--n", "2", "--rank", "2", "--seed", "1")[1])
    assert doc["kind"] == "mixed" and len(doc["rho"]) == 4


def test_gen_named_round_trip(tmp_path, capsys):
    path = write_state(tmp_path, capsys, "ghz", "--n", "3")
    state, warnings = parse_state(json.loads(path.read_text()))
    np.testing.assert_allclose(state, ghz(3), atol=1e-16)
    assert warnings == []
    doc = json.loads(run(capsys, "gen", "basis", "--n", "3", "--bits", "101")[1])
    assert doc["amps"][5] == [1.0, 0.0]


def test_gen_usage_errors(capsys):
    assert run(capsys, "gen", "ghz")[0] == 2
    assert run(capsys, "gen", "w3", "--n", "4")[0] == 2
    assert run(capsys, "gen", "basis", "--n", "2", "--bits", "012")[0] == 2
    assert run(capsys, "gen", "ginibre", "--n", "1", "--rank", "3")[0] == 2


def test_check_file_exit_zero(tmp_path, capsys):
    path = write_state(tmp_path, capsys, "ghz", "--n", "3", name="ghz3.json")
    code, out, _ = run(capsys, "check", "ckw", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["summary"]["max_residual"] <= 1e-12
    assert report["spec"]["sampler"] == "fixed"


def test_check_random_identity(capsys):
    code, out, _ = run(capsys, "check", "eq11", "--random", "--n", "4", "--trials", "1000", "--seed", "42", "--tol", "1e-9")
    assert code == 0
    assert json.loads(out)["summary"]["failures"] == 0


def test_check_reports_failures_with_exit_one(capsys):
    code, out, _ = run(capsys, "check", "eq11", "--random", "--n", "3", "--trials", "5", "--tol", "1e-300")
    assert code == 1
    failures = json.loads(out)["failures"]
    assert failures and {"trial", "seed", "residual"} <= set(failures[0])


def test_check_usage_errors(tmp_path, capsys):
    code, _, err = run(capsys, "check", "eq17", "--random", "--n", "4")
    assert code == 2 and "odd" in err
    assert run(capsys, "check", "eq11", "--random")[0] == 2
    assert run(capsys, "check", "eq11")[0] == 2
    path = write_state(tmp_path, capsys, "ghz", "--n", "3")
    assert run(capsys, "check", "eq11", str(path), "--random", "--n", "3")[0] == 2
    assert run(capsys, "check", "eq11", str(path), "--n", "4")[0] == 2
    mixed = write_state(tmp_path, capsys, "ginibre", "--n", "2", name="mixed.json")
    assert run(capsys, "check", "eq11", str(mixed))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "eq99", "--random", "--n", "3"])
    assert exc.value.code == 2


def test_check_named_and_ginibre(capsys):
    assert run(capsys, "check", "eq16", "--state", "w3", "--n", "3", "--trials", "1")[0] == 0
    code, out, _ = run(capsys, "check", "eq10", "--random", "--n", "3", "--rank", "2", "--trials", "20")
    assert code == 0 and json.loads(out)["spec"]["sampler"] == "ginibre"


def test_check_formats(capsys):
    base = ("check", "eq4", "--random", "--n", "2", "--trials", "4")
    code, out, _ = run(capsys, *base, "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "trial,residual,pass"
    code, out, _ = run(capsys, *base, "--format", "text")
    assert out.startswith("PASS eq4 N=2")
    out = run(capsys, *base, "--verbose")[1]
    assert len(json.loads(out)["residuals"]) == 4


def test_check_parallel_output_matches_serial(capsys):
    base = ("check", "eq13", "--random", "--n", "5", "--trials", "30", "--seed", "8")
    assert run(capsys, *base)[1] == run(capsys, *base, "--workers", "4")[1]


@pytest.mark.parametrize(
    "content",
    [
        "not json",
        json.dumps([1, 2]),
        json.dumps({"n": 2, "kind": "pure", "amps": [[1, 0]] * 3}),
        json.dumps({"n": 1, "kind": "pure", "amps": [[1, 0], [1, 0]]}),
        json.dumps({"n": 1, "kind": "mixed", "rho": [[[1, 0], [1, 0]], [[0, 0], [0, 0]]]}),
        json.dumps({"n": 1, "kind": "mixed", "rho": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}),
        json.dumps({"n": 1, "kind": "other"}),
        json.dumps({"n": 0, "kind": "pure", "amps": []}),
        json.dumps({"n": 1, "kind": "pure", "amps": [["a", 0], [0, 0]]}),
    ],
)
def test_malformed_files_exit_three(tmp_path, capsys, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert run(capsys, "invariants", str(path))[0] == 3
    assert run(capsys, "check", "eq4", str(path))[0] == 3


def test_missing_file_exit_three(tmp_path, capsys):
    assert run(capsys, "invariants", str(tmp_path / "absent.json"))[0] == 3


def test_near_valid_state_is_projected_with_warning():
    psi, warnings = parse_state({"n": 1, "kind": "pure", "amps": [[1 + 1e-8, 0], [0, 0]]})
    assert warnings == ["amplitudes renormalized"]
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-15)
    rho, warnings = parse_state({"n": 1, "kind": "mixed", "rho": [[[1 + 1e-9, 0], [0, 0]], [[0, 0], [-1e-9, 0]]]})
    assert warnings and np.linalg.eigvalsh(rho).min() >= 0
    with pytest.raises(InvalidStateFile):
        parse_state({"n": 1, "kind": "pure", "amps": [[1.1, 0], [0, 0]]})


def test_invariants_output(tmp_path, capsys):
    bell = write_state(tmp_path, capsys, "bell", name="bell.json")
    out = json.loads(run(capsys, "invariants", str(bell))[1])
    assert out["H_abs"] == pytest.approx(1.0, abs=1e-14)
    assert out["concurrence"] == pytest.approx(1.0, abs=1e-14)
    ghz3 = write_state(tmp_path, capsys, "ghz", "--n", "3", name="ghz3.json")
    out = json.loads(run(capsys, "invariants", str(ghz3))[1])
    assert out["three_tangle"] == pytest.approx(1.0, abs=1e-14)
    assert "concurrence: two-qubit states only" in out["notes"]
    w = write_state(tmp_path, capsys, "w3", name="w3.json")
    out = json.loads(run(capsys, "invariants", str(w))[1])
    assert out["tau_A"] == pytest.approx(8 / 9, abs=1e-14)
    assert out["pair_concurrences"]["AB"] == pytest.approx(2 / 3, abs=1e-14)
    text = run(capsys, "invariants", str(w), "--format", "text")[1]
    assert "three_tangle:" in text


def test_invariants_summary_mixed_and_n4():
    out = invariants_summary(np.eye(4) / 4)
    assert out["kind"] == "mixed" and "H_roof" not in out
    assert any("rank" in note for note in out["notes"])
    out = invariants_summary(ghz(4))
    assert out["n4_det_tr14"] == pytest.approx(0.0, abs=1e-15)
    assert invariants_summary(w3())["three_tangle"] == pytest.approx(0.0, abs=1e-14)


def test_sweep_skips_incompatible(tmp_path, capsys):
    path = tmp_path / "sweep.json"
    code, _, err = run(capsys, "sweep", "--relations", "eq17", "--n-range", "3..5", "--trials", "3", "--out", str(path))
    assert code == 0
    assert "skipping eq17 at N=4" in err
    doc = json.loads(path.read_text())
    assert list(doc) == ["sweep", "runs", "skipped", "summary"]
    assert [r["spec"]["n_qubits"] for r in doc["runs"]] == [3, 5]
    assert doc["skipped"][0]["n"] == 4
    assert doc["summary"]["passed"] is True


def test_sweep_runs_and_is_deterministic(capsys):
    args = ("sweep", "--relations", "eq10,eq11", "--n-range", "2..5", "--trials", "200", "--seed", "1")
    code, first, _ = run(capsys, *args)
    assert code == 0
    assert json.loads(first)["summary"]["runs"] == 8
    assert run(capsys, *args, "--workers", "3")[1] == first
    assert run(capsys, *args, "--format", "text")[1].count("PASS") == 8


def test_sweep_usage_errors(capsys):
    assert run(capsys, "sweep", "--relations", "eq99", "--n-range", "2..3")[0] == 2
    assert run(capsys, "sweep", "--relations", "eq11", "--n-range", "x")[0] == 2
    assert run(capsys, "sweep", "--relations", "ckw", "--n-range", "4..5")[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "lorentz_monogamy", "check", "ckw", "--state", "ghz", "--n", "3", "--format", "text"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("PASS ckw N=3")
