import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geometry.catalog import EMBEDDINGS, embedding_datum
from geometry.embedding import (CurvatureCheck, EndoField, check_hypersurface_data, codazzi_residual,
                                constant_curvature_family, constant_curvature_weingarten, cs, endo_from_json, gauss_residual,
                                invertibility_window, killing_family, riccati_residual, sn, verify_embedding)
from geometry.expressions import coord
from utils.errors import DimensionMismatchError, PreconditionError


@settings(max_examples=100, deadline=None)
@given(st.floats(-4.0, 4.0), st.floats(-1.5, 1.5))
def test_generalized_trig_identity(kappa, t):
    assert cs(kappa, t) ** 2 + kappa * sn(kappa, t) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_sn_cs_limits():
    assert sn(0.0, 0.7) == 0.7
    assert cs(0.0, 0.7) == 1.0
    assert sn(1.0, 0.7) == pytest.approx(np.sin(0.7))
    assert cs(-4.0, 0.7) == pytest.approx(np.cosh(1.4))


@pytest.mark.parametrize("kappa", [-1.0, 0.0, 1.0])
def test_weingarten_starts_at_shape_operator(kappa):
    A = np.array([[0.5, 0.2], [0.2, -0.3]])
    np.testing.assert_allclose(constant_curvature_weingarten(A, kappa, 0.0), A, atol=1e-14)


def test_codazzi_residual_detects_non_parallel_data(flat2):
    bad = EndoField.from_expressions([[coord(1), 0], [0, 0]])
    good = EndoField.from_expressions([[coord(0), 0], [0, 0]])
    assert codazzi_residual(flat2, bad, [0.1, 0.2]) == pytest.approx(1.0, abs=1e-8)
    assert codazzi_residual(flat2, good, [0.1, 0.2]) == pytest.approx(0.0, abs=1e-8)


def test_gauss_residual(flat2, sphere2):
    identity = EndoField.scalar(sphere2, 1.0)
    assert gauss_residual(sphere2, identity, 0.0, [1.1, 0.3]) <= 1e-5
    zero = EndoField.scalar(flat2, 0.0)
    assert gauss_residual(flat2, zero, 0.0, [0.1, 0.2]) == pytest.approx(0.0, abs=1e-10)
    assert gauss_residual(flat2, zero, 1.0, [0.1, 0.2]) == pytest.approx(1.0, abs=1e-10)


def test_window_of_the_cone(sphere2):
    window = invertibility_window(EndoField.scalar(sphere2, 1.0), sphere2, 0.0)
    assert window == pytest.approx((-0.9, 0.9))


def test_window_for_positive_curvature(flat2):
    # A = 2·Id, κ = 1: cos t = 2 sin t at t = atan(1/2); the far side only at atan(1/2) - π
    window = invertibility_window(EndoField.scalar(flat2, 2.0), flat2, 1.0, margin=0.0)
    assert window == pytest.approx((-np.arctan(0.5), np.arctan(0.5)))


def test_window_is_symmetric(flat2):
    # 1 - 2t is singular at t = 1/2 and nowhere for t < 0
    window = invertibility_window(EndoField.scalar(flat2, 2.0), flat2, 0.0)
    assert window == pytest.approx((-0.45, 0.45))


@pytest.mark.parametrize("build", [
    lambda g, A: killing_family(g, A, check=False),
    lambda g, A: constant_curvature_family(g, A, 0.0, check=False),
], ids=["killing", "constant_curvature"])
def test_shrunk_window_is_logged(flat2, caplog, build):
    with caplog.at_level(logging.WARNING, logger="geometry.embedding"):
        fam = build(flat2, EndoField.scalar(flat2, 2.0))
    assert fam.t_interval == pytest.approx((-0.45, 0.45))
    assert any("t-window shrunk to [-0.4500, 0.4500]" in r.getMessage() for r in caplog.records)


def test_full_window_is_not_logged(sphere2, caplog):
    with caplog.at_level(logging.WARNING, logger="geometry.embedding"):
        killing_family(sphere2, EndoField.scalar(sphere2, 1.0))
    assert not [r for r in caplog.records if "t-window" in r.getMessage()]


def test_window_ignores_small_eigenvalues_in_negative_curvature(flat2):
    window = invertibility_window(EndoField.scalar(flat2, 0.5), flat2, -1.0, margin=0.0)
    assert window == pytest.approx((-1.0, 1.0))


@pytest.mark.parametrize("name", [n for n in EMBEDDINGS if n != "flat_negative"])
def test_valid_data_give_constant_curvature(name):
    datum = embedding_datum(name)
    report = verify_embedding(datum.metric, datum.endomorphism, datum.kappa, samples=6, seed=1)
    assert report.codazzi_residual <= 1e-6
    assert report.gauss_residual <= 1e-5
    assert report.passed, report.to_dict()
    assert report.curvature.weingarten_at_zero <= 1e-8


def test_negative_control_shows_large_residual():
    datum = embedding_datum("flat_negative")
    report = verify_embedding(datum.metric, datum.endomorphism, datum.kappa, samples=6, seed=1)
    assert report.gauss_residual == pytest.approx(1.0, abs=1e-8)
    assert report.curvature.curvature_residual > 0.1
    assert not report.passed


def test_riccati_equation_on_sphere_slices():
    datum = embedding_datum("sphere_in_sphere")
    fam = constant_curvature_family(datum.metric, datum.endomorphism, datum.kappa)
    assert riccati_residual(fam, 1.0, 0.1, [1.2, 0.5]) <= 1e-5


def test_preconditions_reject_non_codazzi_data(flat2):
    bad = EndoField.from_expressions([[coord(1), 0], [0, 0]])
    with pytest.raises(PreconditionError) as excinfo:
        check_hypersurface_data(flat2, bad, None)
    assert excinfo.value.details["codazzi_residual"] > 0.5
    with pytest.raises(PreconditionError):
        killing_family(flat2, bad)


def test_preconditions_reject_gauss_violation(flat2):
    with pytest.raises(PreconditionError):
        constant_curvature_family(flat2, EndoField.scalar(flat2, 0.0), 1.0)


def test_asymmetric_endomorphism(flat2):
    skew = endo_from_json({"A": [[0, 1], [-1, 0]]})
    with pytest.raises(PreconditionError):
        check_hypersurface_data(flat2, skew, None)


def test_endomorphism_dimension(flat2):
    with pytest.raises(DimensionMismatchError):
        check_hypersurface_data(flat2, endo_from_json([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), None)


def test_killing_family_is_shrinking_cone(sphere2):
    fam = killing_family(sphere2, EndoField.scalar(sphere2, 1.0))
    p = [1.2, 0.3]
    np.testing.assert_allclose(fam.g(0.5, p), 0.25 * sphere2(p), atol=1e-12)
    assert fam.t_interval == pytest.approx((-0.9, 0.9))


def test_curvature_check_needs_the_initial_weingarten_map():
    check = CurvatureCheck(kappa=0.0, window=(-0.9, 0.9), samples=1)
    assert check.passed(1e-4)
    check.weingarten_at_zero = 1e-9
    assert check.passed(1e-4)
    check.weingarten_at_zero = 1e-3
    assert not check.passed(1e-4)
