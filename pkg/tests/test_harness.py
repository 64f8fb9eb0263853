import json

import numpy as np
import pytest

from lorentz_monogamy import harness
from lorentz_monogamy.errors import IncompatibleSpec, ResourceLimit
from lorentz_monogamy.harness import (
    EnsembleSpec,
    compatibility_problem,
    parse_report,
    report_to_dict,
    run_ensemble,
    run_invariance_sweep,
    run_trial,
    serialize_report,
    summary_from_residuals,
)
from lorentz_monogamy.states import ghz, mix_seed


def test_spec_defaults():
    spec = EnsembleSpec("eq11", 4)
    assert spec.sampler == "haar" and spec.tolerance == 1e-9 and spec.verbose
    assert EnsembleSpec("eq10", 3).sampler == "ginibre"
    assert EnsembleSpec("eq17", 3).tolerance == 1e-8
    assert not EnsembleSpec("eq4", 1, trials=harness.VERBOSE_LIMIT + 1).verbose


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(relation="eq17", n_qubits=4),
        dict(relation="eq16", n_qubits=2),
        dict(relation="ckw", n_qubits=4),
        dict(relation="eq2", n_qubits=2),
        dict(relation="n4deg4", n_qubits=3),
        dict(relation="eq11", n_qubits=3, sampler="ginibre"),
        dict(relation="eq10", n_qubits=2, rank=5),
        dict(relation="eq10", n_qubits=2, trials=0),
        dict(relation="eq10", n_qubits=2, tolerance=-1.0),
        dict(relation="nope", n_qubits=2),
        dict(relation="eq11", n_qubits=3, sampler="named", state="tetra"),
    ],
)
def test_incompatible_specs(kwargs):
    with pytest.raises(IncompatibleSpec):
        EnsembleSpec(**kwargs)


def test_resource_guard(monkeypatch):
    monkeypatch.setenv("LM_MAX_QUBITS", "4")
    with pytest.raises(ResourceLimit):
        EnsembleSpec("eq11", 5)


def test_compatibility_problem_mentions_reason():
    assert compatibility_problem("eq17", 3) is None
    assert "odd" in compatibility_problem("eq17", 4)
    assert "unknown" in compatibility_problem("eq99", 3)


def test_identity_ensembles_have_no_failures():
    report = run_ensemble(EnsembleSpec("eq11", 4, trials=200, seed=42, tolerance=1e-9))
    assert report.failure_count == 0 and report.passed
    assert report.max_residual <= 1e-12
    report = run_ensemble(EnsembleSpec("eq10", 3, trials=100, rank=8))
    assert report.failure_count == 0


def test_failures_are_recorded_and_reproducible():
    # an impossible tolerance makes every nonzero residual a failure
    spec = EnsembleSpec("eq11", 5, trials=30, seed=7, tolerance=1e-300)
    report = run_ensemble(spec)
    assert report.failure_count > 0
    for f in report.failures:
        assert f["seed"] == mix_seed(7, f["trial"])
        assert run_trial(spec, f["trial"]) == f["residual"]
        assert report.residuals[f["trial"]] == f["residual"]


def test_same_seed_same_bytes_serial_and_parallel():
    for spec in (EnsembleSpec("eq11", 4, trials=10, seed=42), EnsembleSpec("eq13", 5, trials=20, seed=3)):
        serial = serialize_report(run_ensemble(spec))
        again = serialize_report(run_ensemble(spec))
        parallel = serialize_report(run_ensemble(spec, workers=4))
        assert serial == again == parallel
        assert serialize_report(run_ensemble(spec), "csv") == serialize_report(run_ensemble(spec, workers=3), "csv")


def test_different_seeds_differ():
    a = run_ensemble(EnsembleSpec("eq11", 4, trials=5, seed=1))
    b = run_ensemble(EnsembleSpec("eq11", 4, trials=5, seed=2))
    assert a.residuals != b.residuals


def test_timing_is_optional_and_excluded_by_default():
    report = run_ensemble(EnsembleSpec("eq4", 2, trials=3))
    assert b"timing" not in serialize_report(report)
    d = json.loads(serialize_report(report, include_timing=True))
    assert d["timing"]["wall_time_s"] >= 0


def test_json_schema_and_round_trip():
    spec = EnsembleSpec("eq16", 3, trials=8, seed=5)
    report = run_ensemble(spec)
    text = serialize_report(report, verbose=True)
    d = json.loads(text)
    assert list(d) == ["spec", "summary", "failures", "residuals"]
    assert list(d["summary"]) == ["trials", "max_residual", "mean_residual", "failures"]
    assert d["spec"]["relation"] == "eq16" and d["spec"]["seed"] == 5
    back = parse_report(text)
    assert back == report
    assert serialize_report(back, verbose=True) == text


def test_csv_round_trip():
    report = run_ensemble(EnsembleSpec("eq4", 3, trials=6, seed=9))
    data = serialize_report(report, "csv")
    lines = data.decode().splitlines()
    assert lines[0] == "trial,residual,pass"
    assert len([l for l in lines if not l.startswith("#")]) == 7
    back = parse_report(data, "csv")
    assert back == report


def test_csv_without_rows_lists_failures_only():
    spec = EnsembleSpec("eq11", 3, trials=12, seed=1, tolerance=1e-300, verbose=False)
    report = run_ensemble(spec)
    assert report.residuals is None
    back = parse_report(serialize_report(report, "csv"), "csv")
    assert back.failures == report.failures and back.residuals is None


def test_summary_recomputes_from_residuals():
    report = run_ensemble(EnsembleSpec("ckw", 3, trials=25, seed=11))
    again = summary_from_residuals(report.spec, report.residuals)
    assert (again.max_residual, again.mean_residual, again.failures) == (
        report.max_residual,
        report.mean_residual,
        report.failures,
    )


def test_float_format_is_shortest_safe():
    assert harness._fmt(0.1) == "0.10000000000000001"
    assert harness._fmt(1.0) == "1.0"
    assert harness._fmt(float("nan")) == "NaN"
    assert float(harness._fmt(np.pi)) == np.pi


def test_named_and_fixed_samplers():
    report = run_ensemble(EnsembleSpec("ckw", 3, trials=2, sampler="named", state="w3"))
    assert report.max_residual <= 1e-12
    report = run_ensemble(EnsembleSpec("eq13", 4, trials=1, sampler="fixed", state="file"), state=ghz(4))
    assert report.max_residual <= 1e-12
    with pytest.raises(IncompatibleSpec):
        run_ensemble(EnsembleSpec("eq13", 4, trials=1, sampler="fixed"))
    with pytest.raises(IncompatibleSpec):
        run_ensemble(EnsembleSpec("eq13", 3, trials=1, sampler="fixed"), state=ghz(4))
    with pytest.raises(IncompatibleSpec):
        run_ensemble(EnsembleSpec("eq11", 2, trials=1, sampler="fixed"), state=np.eye(4) / 4)


def test_invariance_sweeps():
    sl = run_invariance_sweep(EnsembleSpec("sl-invariance", 4, trials=40, seed=2))
    assert sl.passed and sl.max_residual <= 1e-8
    pure_sl = run_invariance_sweep(EnsembleSpec("sl-invariance", 3, trials=20, sampler="haar"))
    assert pure_sl.passed
    lu = run_invariance_sweep(EnsembleSpec("lu-invariance", 3, trials=40))
    assert lu.passed and lu.max_residual <= 1e-9
    with pytest.raises(IncompatibleSpec):
        run_invariance_sweep(EnsembleSpec("eq4", 2, trials=1))


def test_report_dict_omits_residuals_when_not_verbose():
    report = run_ensemble(EnsembleSpec("eq4", 2, trials=3))
    assert "residuals" not in report_to_dict(report)
    assert len(report_to_dict(report, verbose=True)["residuals"]) == 3
