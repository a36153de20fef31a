import json

import numpy as np
import pytest
from click.testing import CliRunner

from cli import cli

ETA = "[[1, 0], [0, -1]]"
HYPERBOLIC = "[[4, 0], [0, -0.25]]"
BEYOND = "[[-2.618033988749895, 0], [0, 0.3819660112501051]]"


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, args, **kwargs):
    result = runner.invoke(cli, ["--log-level", "ERROR", *args], **kwargs)
    return result, json.loads(result.stdout) if result.stdout.strip() else None


def test_catalog_list(runner):
    result, out = _invoke(runner, ["catalog", "list"])
    assert result.exit_code == 0
    assert "conformal_sphere" in out["families"]
    assert out["suites"] == ["clifford", "cylinder", "embed", "lorentz", "spin"]
    eager, listed = _invoke(runner, ["--catalog-list"])
    assert eager.exit_code == 0
    assert listed == out


def test_clifford_table(runner):
    result, out = _invoke(runner, ["clifford", "table", "--signature", "2,1"])
    assert result.exit_code == 0
    assert out["signature"] == [2, 1]


def test_bad_signature_is_a_schema_error(runner):
    result, out = _invoke(runner, ["clifford", "table", "--signature", "two,one"])
    assert result.exit_code == 2
    assert out["error"] == "schema"


def test_clifford_rep(runner):
    result, out = _invoke(runner, ["clifford", "rep", "--signature", "3,0"])
    assert result.exit_code == 0
    assert out["pass"]
    assert out["representation"]["beta_skew"] in (True, False)


def test_lorentz_classify(runner):
    result, out = _invoke(runner, ["lorentz", "classify", "--g0", ETA, "--g1", HYPERBOLIC])
    assert result.exit_code == 0
    assert out["verdict"] == "UniqueTimelike"
    assert out["diagnostics"] == out["details"]["verdict"]["diagnostics"]
    assert "generator" in out
    assert out["pass"]


def test_lorentz_classify_needs_both_products(runner):
    result, out = _invoke(runner, ["lorentz", "classify", "--g0", ETA])
    assert result.exit_code == 2
    assert out["error"] == "schema"


def test_malformed_json(runner):
    result, out = _invoke(runner, ["run", "--json", '{"kind": "lorentz", '])
    assert result.exit_code == 2
    assert out["error"] == "schema"
    assert "malformed JSON" in out["message"]


def test_run_needs_input(runner):
    result, _ = _invoke(runner, ["run"])
    assert result.exit_code == 2


def test_failed_expectation_exits_with_one(runner):
    case = json.dumps({"kind": "lorentz", "g0": json.loads(ETA), "g1": json.loads(HYPERBOLIC),
                       "expect": "NoGeodesic"})
    result, out = _invoke(runner, ["run", "--json", case])
    assert result.exit_code == 1
    assert out["failures"] == ["verdict"]
    assert not out["pass"]


def test_case_file_and_stdin(runner, tmp_path):
    case = json.dumps({"kind": "lorentz", "g0": json.loads(ETA), "g1": json.loads(HYPERBOLIC),
                       "expect": "UniqueTimelike"})
    path = tmp_path / "case.json"
    path.write_text(case)
    result, out = _invoke(runner, ["run", str(path)])
    assert result.exit_code == 0
    assert out["provenance"]["payload"]["expect"] == "UniqueTimelike"
    piped, again = _invoke(runner, ["run", "-"], input=case)
    assert piped.exit_code == 0
    assert again["residuals"] == out["residuals"]


def test_library_error_exit_code(runner):
    result, out = _invoke(runner, ["lorentz", "classify", "--g0", "[[1, 0], [0, 1]]", "--g1", HYPERBOLIC])
    assert result.exit_code == 2
    assert out["error"] == "signature_mismatch"


def test_interpolate(runner):
    result, out = _invoke(runner, ["lorentz", "interpolate", "--g0", ETA, "--g1", HYPERBOLIC, "--samples", "3"])
    assert result.exit_code == 0
    assert len(out) == 3
    assert out[0] == [[1.0, 0.0], [0.0, -1.0]]
    np.testing.assert_allclose(out[-1], [[4.0, 0.0], [0.0, -0.25]], atol=1e-12)
    _, legacy = _invoke(runner, ["lorentz", "interpolate", "--g0", ETA, "--g1", HYPERBOLIC, "--steps", "3"])
    assert legacy == out


def test_interpolate_reads_matrix_files(runner, tmp_path):
    (tmp_path / "g0.json").write_text(ETA)
    (tmp_path / "g1.json").write_text(HYPERBOLIC)
    result, out = _invoke(runner, ["lorentz", "interpolate", "--g0", str(tmp_path / "g0.json"),
                                   "--g1", str(tmp_path / "g1.json"), "--samples", "2"])
    assert result.exit_code == 0
    np.testing.assert_allclose(out[1], [[4.0, 0.0], [0.0, -0.25]], atol=1e-12)


def test_interpolate_without_geodesic(runner):
    result, out = _invoke(runner, ["lorentz", "interpolate", "--g0", ETA, "--g1", BEYOND])
    assert result.exit_code == 1
    assert out == []


def test_timing_flag(runner):
    result, out = _invoke(runner, ["--timing", "lorentz", "classify", "--g0", ETA, "--g1", HYPERBOLIC])
    assert result.exit_code == 0
    assert out["elapsed"] >= 0.0


def test_embed_verify_from_explicit_data(runner):
    result, out = _invoke(runner, ["embed", "verify", "--g", "round_sphere", "--A", "[[1, 0], [0, 1]]",
                                   "--kappa", "0", "--samples", "4"])
    assert result.exit_code == 0, out
    for key in ("codazzi_residual", "gauss_residual", "window", "curvature_residual"):
        assert out[key] == out["details"][key]
    assert out["window"] == pytest.approx([-0.9, 0.9])
    assert out["pass"]


def test_embed_verify_needs_complete_data(runner):
    result, out = _invoke(runner, ["embed", "verify", "--g", "round_sphere", "--kappa", "0"])
    assert result.exit_code == 2
    assert out["error"] == "schema"


def test_embed_verify_defaults_to_the_cone(runner):
    result, out = _invoke(runner, ["embed", "verify", "--samples", "3"])
    assert result.exit_code == 0
    assert out["name"] == "embed:sphere_cone"


def test_cylinder_verify_reports_residual_by_identity(runner):
    result, out = _invoke(runner, ["cylinder", "verify", "--family", "static", "--samples", "2", "--tol", "1e-5"])
    assert result.exit_code == 0, out
    assert set(out["max_residual_by_identity"]) <= set(out["residuals"])
    assert out["max_residual_by_identity"]
    assert out["tolerances"]
    assert all(value == 1e-5 for value in out["tolerances"].values())


def test_subcommand_knobs_override_group_knobs(runner):
    args = ["cylinder", "verify", "--family", "static"]
    _, grouped = _invoke(runner, ["--samples", "2", "--seed", "3", *args])
    _, local = _invoke(runner, [*args, "--samples", "2", "--seed", "3"])
    assert local["residuals"] == grouped["residuals"]
    assert local["provenance"] == grouped["provenance"]


def test_variation_check_at_given_points(runner):
    spinor = json.dumps({"components": [["1 + 0.2*x0", "0"], ["0.1*x1", "0.3"]]})
    result, out = _invoke(runner, ["spin", "variation-check", "--family", "linear", "--spinor", spinor,
                                   "--point", "0.1,0.2", "--point", "-0.3,0.05"])
    assert result.exit_code == 0, out
    assert out["provenance"]["payload"]["points"] == [[0.1, 0.2], [-0.3, 0.05]]
    assert out["pass"]


def test_variation_check_rejects_bad_points(runner):
    result, out = _invoke(runner, ["spin", "variation-check", "--point", "0.1,zero"])
    assert result.exit_code == 2
    assert out["error"] == "schema"
    short, again = _invoke(runner, ["spin", "variation-check", "--point", "0.1"])
    assert short.exit_code == 2
    assert again["error"] == "schema"


def test_killing_check_by_case_name(runner):
    result, out = _invoke(runner, ["spin", "killing-check", "--case", "flat"])
    assert result.exit_code == 0, out
    assert out["name"] == "spin:flat"
    rejected, control = _invoke(runner, ["spin", "killing-check", "--datum", "non_codazzi"])
    assert rejected.exit_code == 0
    assert control["residuals"] == {"rejected": 0.0}


def test_missing_case_file_is_a_schema_error(runner, tmp_path):
    result, out = _invoke(runner, ["run", str(tmp_path / "missing.json")])
    assert result.exit_code == 2
    assert out["error"] == "schema"
    assert out["details"]["path"].endswith("missing.json")


def test_suite_runs_through_the_workflow(runner):
    result, out = _invoke(runner, ["suite", "lorentz", "--seed", "1", "--max-workers", "2"])
    assert result.exit_code == 0
    assert out["summary"]["passed"] == out["summary"]["cases"]
    _, grouped = _invoke(runner, ["--seed", "1", "suite", "lorentz"])
    assert grouped["summary"] == out["summary"]
