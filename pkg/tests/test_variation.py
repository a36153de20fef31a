import numpy as np
import pytest

from algebra.spinor_rep import SpinorVector
from geometry.catalog import family, linear_family
from geometry.chart_tensor import gram_schmidt
from geometry.cylinder import transport_vector
from spin.hypersurface import (commutator_residual, cylinder_spin_derivatives, dirac_relation_residual,
                               hypersurface_gauss_residual, leaf_rep, parallel_extension)
from spin.spin_field import SpinorField, clifford_multiply
from spin.variation import (convergence_ratio, energy_momentum, lagrangian_variation_check, transport_spinor,
                            variation_check, variation_rhs, volume_derivative_check, volume_ratio)
from utils.errors import DimensionMismatchError

P_FLAT = np.array([0.2, -0.3])
P_SPHERE = np.array([1.2, 0.4])


def _polynomial_spinor(fam, t0=0.0):
    rep = leaf_rep(fam.signature)
    return SpinorField.from_expressions(fam.slice(t0), rep, [["1 + 0.3*x0", "0.2*x1"], ["0.1*x1", "-0.2*x0"]],
                                        name="polynomial")


@pytest.fixture(params=["linear", "conformal_sphere"])
def family_and_point(request):
    fam = family(request.param)
    return fam, P_FLAT if request.param == "linear" else P_SPHERE


def test_dirac_variation(family_and_point):
    fam, p = family_and_point
    result = variation_check(fam, _polynomial_spinor(fam), 0.0, p)
    assert result.residual <= 1e-4
    assert np.linalg.norm(result.rhs) > 1e-3


@pytest.mark.slow
def test_central_quotient_is_second_order():
    fam = linear_family()
    ratio = convergence_ratio(fam, _polynomial_spinor(fam), 0.0, P_FLAT)
    assert 3.0 <= ratio <= 5.0


def test_static_family_has_no_variation():
    fam = family("static")
    np.testing.assert_allclose(variation_rhs(fam, _polynomial_spinor(fam), 0.0, P_FLAT), 0.0, atol=1e-12)


def test_commutator(family_and_point):
    fam, p = family_and_point
    assert commutator_residual(fam, _polynomial_spinor(fam), 0.0, p) <= 1e-4


@pytest.mark.parametrize("lam", [0.0, 0.5])
def test_lagrangian_variation(lam):
    fam = linear_family()
    result = lagrangian_variation_check(fam, _polynomial_spinor(fam), lam, 0.0, P_FLAT)
    assert result["residual"] <= 1e-4


def test_volume_derivative():
    fam = family("conformal_sphere")
    result = volume_derivative_check(fam, 0.1, P_SPHERE)
    # g_t = e^{2t} g on a surface: dV_t/dV_t0 = e^{2(t - t0)}
    assert result["closed_form"] == pytest.approx(2.0)
    assert result["residual"] <= 1e-6
    assert volume_ratio(fam, 0.0, 0.25, P_SPHERE) == pytest.approx(np.exp(0.5))


def test_energy_momentum_is_symmetric():
    fam = family("conformal_sphere")
    psi = _polynomial_spinor(fam)
    Q = energy_momentum(psi, P_SPHERE)
    assert Q.symmetry_defect() == 0.0
    X, Y = np.array([1.0, 0.0]), np.array([0.3, 1.0])
    assert Q(X, Y) == pytest.approx(Q(Y, X))
    lam = energy_momentum(psi, P_SPHERE, lam=0.5)
    assert lam.symmetry_defect() == 0.0


def test_spinor_transport_preserves_norm():
    fam = linear_family()
    rep = leaf_rep(fam.signature)
    sigma = SpinorVector(np.array([0.6, 0.8j]), rep)
    moved = transport_spinor(fam, P_FLAT, -0.2, 0.3, sigma)
    assert np.linalg.norm(moved.components) == pytest.approx(1.0, rel=1e-8)
    back = transport_spinor(fam, P_FLAT, 0.3, -0.2, moved)
    np.testing.assert_allclose(back.components, sigma.components, atol=1e-8)


def test_transport_of_raw_components_needs_rep():
    with pytest.raises(DimensionMismatchError):
        transport_spinor(linear_family(), P_FLAT, 0.0, 0.1, np.array([1.0, 0.0]))


@pytest.mark.parametrize("t", [-0.2, 0.15])
def test_spinorial_gauss_formula(family_and_point, t):
    fam, p = family_and_point
    psi = _polynomial_spinor(fam)
    phi = parallel_extension(fam, psi, 0.0)
    assert hypersurface_gauss_residual(fam, phi, psi.rep, t, p) <= 1e-5
    assert dirac_relation_residual(fam, phi, psi.rep, t, p) <= 1e-4


def test_parallel_extension_is_normally_parallel(family_and_point):
    fam, p = family_and_point
    psi = _polynomial_spinor(fam)
    phi = parallel_extension(fam, psi, 0.0)
    nabla = cylinder_spin_derivatives(fam, psi.rep, phi, 0.1, p)
    assert np.linalg.norm(nabla[0]) <= 1e-5


@pytest.mark.parametrize("t1", [-0.25, 0.3])
def test_transport_intertwines_clifford_multiplication(family_and_point, t1):
    fam, p = family_and_point
    rep = leaf_rep(fam.signature)
    t0 = 0.05
    sigma = np.array([0.6, 0.8j])
    X = np.array([0.7, -0.4])

    def multiply(t, v, s):
        G = fam.g(t, p)
        E, _ = gram_schmidt(G)
        return clifford_multiply(rep, E, G, v, s)

    lhs = transport_spinor(fam, p, t0, t1, multiply(t0, X, sigma), rep=rep).components
    moved = transport_spinor(fam, p, t0, t1, sigma, rep=rep).components
    rhs = multiply(t1, transport_vector(fam, p, t0, t1, X), moved)
    assert np.abs(lhs - rhs).max() <= 1e-6
