import numpy as np
import pytest

from algebra.clifford import Signature
from algebra.spinor_rep import build_spinor_rep
from geometry.catalog import de_sitter_2d, flat, sphere_killing_spinor_value
from geometry.embedding import EndoField
from spin.hypersurface import leaf_rep
from spin.killing import integrate_killing_spinor, killing_equation_residual
from spin.spin_field import (SpinorField, dirac, leibniz_residual, metric_compatibility_residual,
                             ricci_identity_residual, self_adjointness_residual, spin_covariant_derivative,
                             spin_curvature, spinor_from_json)
from utils.errors import DimensionMismatchError, SchemaError, SignatureMismatchError

P = [1.1, 0.4]


@pytest.fixture
def rep2():
    return leaf_rep(Signature(2, 0))


@pytest.fixture
def killing(sphere2, rep2):
    sigma0 = np.array([1.0, 0.0], dtype=complex)
    value = sphere_killing_spinor_value(rep2.gamma[0], rep2.gamma[1], sigma0)
    return SpinorField(metric=sphere2, rep=rep2, value=value, name="killing")


@pytest.fixture
def psi(sphere2, rep2):
    return SpinorField.from_expressions(sphere2, rep2, [["1 + 0.3*x0", "0.2*x1"], ["0.1*x1", "-0.2*x0"]])


@pytest.fixture
def other(sphere2, rep2):
    return SpinorField.from_expressions(sphere2, rep2, [["sin(x1)", "0"], ["0.5", "x0*x1"]])


def test_sphere_killing_spinor(killing, sphere2):
    assert killing_equation_residual(killing, EndoField.scalar(sphere2, 1.0), P) <= 1e-7


def test_killing_spinor_is_a_dirac_eigenspinor(killing):
    np.testing.assert_allclose(dirac(killing, P), -killing(P), atol=1e-7)


def test_constant_spinor_on_flat_space_is_parallel(flat2, rep2):
    psi = SpinorField.constant(flat2, rep2, [1.0, 1j])
    assert np.abs(spin_covariant_derivative(psi, 0, [0.1, 0.2]).components).max() <= 1e-12
    assert np.abs(dirac(psi, [0.1, 0.2])).max() <= 1e-12


def test_integrated_killing_spinor_matches_closed_form(sphere2, rep2):
    sigma0 = np.array([0.6, 0.8j])
    closed = sphere_killing_spinor_value(rep2.gamma[0], rep2.gamma[1], sigma0)
    base = np.array([1.0, 0.0])
    target = np.array([1.4, 0.6])
    value = integrate_killing_spinor(sphere2, EndoField.scalar(sphere2, 1.0), rep2, base, closed(base), target)
    np.testing.assert_allclose(value, closed(target), atol=1e-6)


def test_spin_curvature_matches_riemann(psi):
    assert float(spin_curvature(psi, P)["residual"]) <= 1e-5


def test_spin_curvature_on_de_sitter():
    g = de_sitter_2d()
    rep = build_spinor_rep(Signature(1, 1))
    psi = SpinorField.constant(g, rep, [1.0, 0.5])
    assert float(spin_curvature(psi, [0.2, 0.3])["residual"]) <= 1e-5


def test_ricci_identity(psi):
    assert ricci_identity_residual(psi, P) <= 1e-5


def test_metric_compatibility(psi, other):
    assert metric_compatibility_residual(psi, other, P) <= 1e-7


def test_leibniz_rule(psi):
    assert leibniz_residual(psi, lambda x: np.array([x[1], 1.0 + 0.2 * x[0]]), P) <= 1e-7


def test_dirac_is_formally_self_adjoint(psi, other):
    assert self_adjointness_residual(psi, other, P) <= 1e-6


def test_self_adjointness_without_skew_form():
    # no skew invariant form exists on (2,1)
    g = flat(Signature(2, 1))
    rep = build_spinor_rep(Signature(2, 1))
    assert not rep.beta_skew
    phi = SpinorField.from_expressions(g, rep, [["x0", "0"], ["0.5", "x2"]])
    psi = SpinorField.from_expressions(g, rep, [["1", "x1"], ["x2*x0", "0"]])
    assert self_adjointness_residual(phi, psi, [0.1, -0.2, 0.3]) <= 1e-8


def test_signature_mismatch(flat2):
    with pytest.raises(SignatureMismatchError):
        SpinorField.constant(flat2, build_spinor_rep(Signature(1, 1)), [1.0, 0.0])


def test_component_count(flat2, rep2):
    with pytest.raises(DimensionMismatchError):
        SpinorField.from_expressions(flat2, rep2, [["1", "0"]] * 3)
    with pytest.raises(SchemaError):
        SpinorField.from_expressions(flat2, rep2, [["1"], ["0"]])
    psi = SpinorField(metric=flat2, rep=rep2, value=lambda x: np.ones(3))
    with pytest.raises(DimensionMismatchError):
        psi([0.0, 0.0])


def test_spinor_json(flat2, rep2):
    psi = spinor_from_json({"components": [["x0", "0"], ["0", "1"]]}, flat2, rep2)
    np.testing.assert_allclose(psi([0.5, 0.0]), [0.5, 1j])
    with pytest.raises(SchemaError):
        spinor_from_json({"values": []}, flat2, rep2)
