import numpy as np
import pytest

from utils.errors import SignatureMismatchError
from workflows.cases import builtin_cases, parse_case
from workflows.verification_workflow import Report, VerificationWorkflow, run, run_safely, suite


def _lorentz(name):
    return next(c for c in builtin_cases("lorentz") if c.name == f"lorentz:{name}")


def test_hyperbolic_pair_succeeds():
    result = VerificationWorkflow().run_analysis(_lorentz("hyperbolic"))
    assert result["status"] == "success"
    assert result["error"] is None
    report = result["report"]
    assert report.residuals["verdict"] == 0.0
    assert report.details["verdict"]["verdict"] == "UniqueTimelike"
    assert report.to_dict()["pass"]


@pytest.mark.parametrize("name", ["antipodal", "nilpotent", "negative_pair", "antipodal_3d"])
def test_lorentz_catalog_pairs(name):
    report = run(_lorentz(name))
    assert report.passed, report.to_dict()


def test_wrong_expectation_fails():
    case = parse_case({"kind": "lorentz", "g0": [[1, 0], [0, -1]], "g1": [[4, 0], [0, -0.25]],
                       "expect": "NoGeodesic"})
    result = VerificationWorkflow().run_analysis(case)
    assert result["status"] == "failed"
    assert result["report"].failures == ["verdict"]


def test_library_errors_become_error_status():
    case = parse_case({"kind": "lorentz", "g0": [[1, 0], [0, 1]], "g1": [[1, 0], [0, -1]]})
    result = VerificationWorkflow().run_analysis(case)
    assert result["status"] == "error"
    assert isinstance(result["error"], SignatureMismatchError)
    report = run_safely(case)
    assert not report.passed
    assert report.error["error"] == "signature_mismatch"
    assert report.error["exit_code"] == 2


def test_random_pairs_case():
    case = parse_case({"kind": "lorentz", "payload": {"random": 3, "dim": 3}, "seed": 2})
    report = run(case)
    assert report.passed, report.to_dict()
    assert report.details["pairs"] == 3
    assert sum(report.details["verdicts"].values()) == 3


def test_clifford_case():
    report = run(parse_case({"kind": "clifford", "payload": {"signature": "2,1"}}))
    assert report.passed
    assert not report.details["beta_skew"]
    assert report.residuals["blade_relation"] == 0.0


def test_negative_controls_pass():
    embed = next(c for c in builtin_cases("embed") if c.name == "embed:flat_negative")
    assert run(embed.model_copy(update={"samples": 3})).passed
    spin = next(c for c in builtin_cases("spin") if c.name == "spin:killing:non_codazzi")
    report = run(spin)
    assert report.passed
    assert report.details["rejection"]["error"] == "precondition"


def test_overrides_win_over_the_case():
    case = parse_case({"kind": "cylinder", "payload": {"family": "linear"}, "samples": 7, "seed": 1})
    updated = VerificationWorkflow(samples=3, seed=9, tol=1e-3).apply_overrides(case)
    assert (updated.samples, updated.seed, updated.tol) == (3, 9, 1e-3)
    assert VerificationWorkflow().apply_overrides(case) is case


def test_report_keeps_the_worst_residual():
    report = Report(name="r", kind="lorentz")
    report.check("exp", 1e-12, 1e-9)
    report.check("exp", 1e-10, 1e-9)
    report.check("exp", 1e-11, 1e-9)
    assert report.residuals["exp"] == 1e-10
    report.check("nan", float("nan"), 1.0)
    assert report.failures == ["nan"]
    assert not report.passed


def test_cylinder_case_reports_worst_points():
    case = parse_case({"kind": "cylinder", "payload": {"family": "warped:exp"}, "samples": 2, "seed": 3})
    report = run(case)
    assert report.passed, report.to_dict()
    assert set(report.details["worst_points"]) <= set(report.residuals)


@pytest.mark.slow
def test_suite_is_deterministic():
    first = suite("lorentz", seed=1, max_workers=4)
    second = suite("lorentz", seed=1, max_workers=1)
    assert first.passed
    assert first.to_dict() == second.to_dict()
    names = [r.name for r in first.reports]
    assert names == sorted(names)


@pytest.mark.slow
@pytest.mark.parametrize("scope", ["clifford", "cylinder", "embed", "spin"])
def test_builtin_suites_pass(scope):
    result = VerificationWorkflow(seed=0).run_suite(scope, progress=False)
    assert result["status"] == "success", [r.to_dict() for r in result["report"].reports if not r.passed]
    assert np.isfinite(result["report"].elapsed)
