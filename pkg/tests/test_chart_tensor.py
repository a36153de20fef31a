import numpy as np
import pytest

from algebra.clifford import Signature
from geometry.catalog import de_sitter_2d, round_sphere, warped_metric
from geometry.chart_tensor import (MetricField, christoffel, covariant_derivative_bilinear,
                                   covariant_derivative_endomorphism, divergence_bilinear, divergence_endomorphism,
                                   frame_christoffel, gram_schmidt, lowered_riemann, metric_derivatives,
                                   metric_from_json, orthonormal_frame, riemann, ricci, sample_points, scalar,
                                   sectional_curvature, signature_of, symmetry_residuals)
from geometry.expressions import COMPILE_CACHE_SIZE, compile_matrix, compile_scalar, coord, const, lambdified
from utils.errors import (BoundaryMarginError, DegenerateMetricError, GaugeFailureError, SchemaError,
                          SignatureMismatchError)

POINTS = [[1.0, 0.3], [0.7, -1.2], [2.1, 2.0]]


@pytest.mark.parametrize("p", POINTS)
def test_unit_sphere_curvature(sphere2, p):
    assert scalar(sphere2, p) == pytest.approx(2.0, abs=1e-5)
    assert sectional_curvature(sphere2, p, np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0, abs=1e-5)
    np.testing.assert_allclose(ricci(sphere2, p), sphere2(p), atol=1e-5)


def test_three_sphere_scalar_curvature():
    g = round_sphere(3)
    assert scalar(g, [1.2, 1.4, 0.5]) == pytest.approx(6.0, abs=1e-4)


def test_flat_metric_has_no_curvature(flat2):
    np.testing.assert_allclose(riemann(flat2, [0.1, -0.2]), 0.0, atol=1e-12)
    np.testing.assert_allclose(christoffel(flat2, [0.1, -0.2]), 0.0, atol=1e-12)


def test_de_sitter_sectional_curvature():
    g = de_sitter_2d()
    assert sectional_curvature(g, [0.3, 0.5], np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0, abs=1e-5)


def test_curvature_symmetries(sphere2):
    p = [1.1, 0.4]
    R = riemann(sphere2, p)
    Rl = lowered_riemann(sphere2, p)
    for key, value in symmetry_residuals(Rl, R).items():
        assert value <= 1e-6, key


def test_metric_derivatives(sphere2):
    # g = diag(1, sin²x0)
    dg = metric_derivatives(sphere2, [1.0, 0.3])
    expected = np.zeros((2, 2, 2))
    expected[0, 1, 1] = np.sin(2.0)
    np.testing.assert_allclose(dg, expected, atol=1e-7)


def test_metric_is_parallel(sphere2):
    p = [1.0, 0.3]
    np.testing.assert_allclose(covariant_derivative_bilinear(sphere2, sphere2, p), 0.0, atol=1e-6)
    np.testing.assert_allclose(divergence_bilinear(sphere2, sphere2, p), 0.0, atol=1e-6)
    np.testing.assert_allclose(covariant_derivative_endomorphism(lambda x: np.eye(2), sphere2, p), 0.0, atol=1e-6)


def test_divergence_of_projection(sphere2):
    # W = ∂_0 ⊗ dx0 has div W = cot x0 ∂_0
    W = lambda x: np.diag([1.0, 0.0])
    np.testing.assert_allclose(divergence_endomorphism(W, sphere2, [1.0, 0.3]), [1.0 / np.tan(1.0), 0.0], atol=1e-6)


def test_warped_metric_curvature():
    # dx0² + e^{2x0}(dx1² + dx2²) is hyperbolic space
    g = warped_metric("exp")
    p = [0.1, 0.2, -0.3]
    assert scalar(g, p) == pytest.approx(-6.0, abs=1e-4)


def test_signature_of_degenerate():
    with pytest.raises(DegenerateMetricError):
        signature_of(np.diag([1.0, 0.0]))
    assert signature_of(np.diag([1.0, -2.0, 3.0])) == (2, 1)


def test_gram_schmidt_orders_spacelike_first():
    G = np.diag([-1.0, 2.0])
    E, eps = gram_schmidt(G)
    assert eps == (1, -1)
    np.testing.assert_allclose(E.T @ G @ E, np.diag(eps), atol=1e-12)
    assert np.linalg.det(E) > 0


def test_gram_schmidt_null_pivot():
    with pytest.raises(GaugeFailureError):
        gram_schmidt(np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_orthonormal_frame(sphere2):
    frame = orthonormal_frame(sphere2, [1.0, 0.5])
    assert frame.residual(sphere2([1.0, 0.5])) <= 1e-12
    np.testing.assert_allclose(frame.components(frame.vectors[:, 0]), [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("g", [round_sphere(2), de_sitter_2d(), warped_metric("cos")], ids=lambda g: g.name)
def test_frame_christoffel_is_metric_compatible(g):
    lo = np.array([b[0] for b in g.domain])
    hi = np.array([b[1] for b in g.domain])
    p = 0.5 * (lo + hi) + 0.1
    C = frame_christoffel(g, p)
    eps = np.array(g.signature.eps)
    antisym = C + eps[:, None, None] * eps[None, None, :] * C.transpose(2, 1, 0)
    assert float(np.abs(antisym).max()) <= 1e-6


def test_wrong_signature_is_rejected():
    entries = [[const(1), const(0)], [const(0), const(-1)]]
    with pytest.raises(SignatureMismatchError):
        MetricField.from_expressions(entries, Signature(2, 0), [[-1, 1], [-1, 1]])


def test_asymmetric_metric_is_rejected():
    entries = [[const(1), coord(0)], [const(0), const(1)]]
    with pytest.raises(SchemaError):
        MetricField.from_expressions(entries, Signature(2, 0), [[-0.1, 0.1], [-0.1, 0.1]])


def test_bad_domain_is_rejected():
    with pytest.raises(SchemaError):
        MetricField.from_expressions([[const(1)]], Signature(1, 0), [[1, -1]])


def test_boundary_margin(flat2):
    with pytest.raises(BoundaryMarginError):
        christoffel(flat2, [1.0, 0.0])


def test_metric_json_round_trip(sphere2):
    again = metric_from_json(sphere2.to_json())
    p = [1.3, 0.2]
    np.testing.assert_allclose(again(p), sphere2(p))
    with pytest.raises(SchemaError):
        metric_from_json({"dim": 2, "signature": [2, 0]})


def test_sample_points_respect_margin(rng):
    box = ((0.0, 1.0), (-2.0, 2.0))
    pts = sample_points(box, 200, rng, margin=0.1)
    assert pts.shape == (200, 2)
    assert pts[:, 0].min() >= 0.1 and pts[:, 0].max() <= 0.9
    assert pts[:, 1].min() >= -1.6 and pts[:, 1].max() <= 1.6


def test_compiled_expressions_are_cached_with_a_bound():
    assert lambdified.cache_info().maxsize == COMPILE_CACHE_SIZE
    first = compile_scalar(coord(0) * coord(1) + 0.25, 2)
    hits = lambdified.cache_info().hits
    again = compile_scalar(coord(0) * coord(1) + 0.25, 2)
    assert again is first
    assert lambdified.cache_info().hits == hits + 1
    f = compile_matrix([[coord(0), const(1)], [const(1), coord(1)]], 2)
    np.testing.assert_allclose(f(0.0, np.array([2.0, 3.0])), [[2.0, 1.0], [1.0, 3.0]])
    assert lambdified.cache_info().currsize <= COMPILE_CACHE_SIZE
