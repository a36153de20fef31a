import numpy as np
import pytest
from scipy.linalg import expm, logm

from lorentz.lorentz_space import (LorentzProduct, VerdictKind, act_on_metric, classify_2d, connecting_geodesic,
                                   de_sitter_product, definite_geodesic, definite_log, from_de_sitter,
                                   geodesic_endomorphism, geodesic_samples, light_cone, lorentz_gauge,
                                   nilpotent_path, normalize_volume, random_lorentz_pair, relating_endomorphism,
                                   symmetric_space_signature, to_de_sitter)
from utils.errors import (DimensionMismatchError, NoGeneratorError, SchemaError, SignatureMismatchError,
                          VolumeMismatchError)

G0 = np.diag([1.0, -1.0])
S_BEYOND = float(np.arccosh(1.5))

CASES_2D = [
    (np.diag([4.0, -0.25]), VerdictKind.UNIQUE_TIMELIKE),
    (np.array([[2.0, -1.0], [-1.0, 0.0]]), VerdictKind.UNIQUE_NULL),
    (np.array([[np.cos(1.0), np.sin(1.0)], [np.sin(1.0), -np.cos(1.0)]]), VerdictKind.UNIQUE_SPACELIKE),
    (np.diag([-1.0, 1.0]), VerdictKind.INFINITELY_MANY_SPACELIKE),
    (np.diag([-np.exp(S_BEYOND), np.exp(-S_BEYOND)]), VerdictKind.NO_GEODESIC),
    (np.array([[-2.0, 1.0], [1.0, 0.0]]), VerdictKind.NO_GEODESIC),
]


def _random_unimodular(rng):
    eta = np.diag([1.0, -1.0])
    M = rng.standard_normal((2, 2))
    while abs(np.linalg.det(M)) < 0.1:
        M = rng.standard_normal((2, 2))
    return normalize_volume(M.T @ eta @ M)


@pytest.mark.parametrize("g1,kind", CASES_2D, ids=[k.value for _, k in CASES_2D])
def test_two_dimensional_verdicts(g1, kind):
    verdict = classify_2d(G0, g1)
    assert verdict.kind == kind
    if verdict.connected:
        residuals = verdict.residuals()
        assert residuals["exp"] <= 1e-9
        assert residuals["symmetry"] <= 1e-12
        np.testing.assert_allclose(geodesic_samples(verdict, 5)[-1], g1, atol=1e-9)
    else:
        with pytest.raises(NoGeneratorError):
            geodesic_endomorphism(verdict, 0.5)
    if verdict.kind != VerdictKind.INFINITELY_MANY_SPACELIKE:
        with pytest.raises(NoGeneratorError):
            verdict.member(0.0)


def test_closed_form_generators():
    np.testing.assert_allclose(classify_2d(G0, np.diag([4.0, -0.25])).generator,
                               np.diag([np.log(4.0), -np.log(4.0)]), atol=1e-12)
    np.testing.assert_allclose(classify_2d(G0, CASES_2D[2][0]).generator, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(classify_2d(G0, CASES_2D[1][0]).generator, [[1.0, -1.0], [1.0, -1.0]], atol=1e-12)


def test_equal_products_give_zero_generator():
    verdict = classify_2d(G0, G0)
    assert verdict.kind == VerdictKind.UNIQUE_TIMELIKE
    np.testing.assert_allclose(verdict.generator, 0.0, atol=1e-12)


def test_antipodal_family_members_all_connect():
    verdict = classify_2d(G0, np.diag([-1.0, 1.0]))
    for s, branch in [(0.0, 1), (0.7, 1), (-1.3, -1)]:
        a = verdict.member(s, branch)
        np.testing.assert_allclose(expm(a), -np.eye(2), atol=1e-9)
        path = geodesic_samples(verdict, 4, member=(s, branch))
        np.testing.assert_allclose(path[-1], np.diag([-1.0, 1.0]), atol=1e-9)


def test_homothety_is_split_off():
    g1 = 2.0 * np.diag([4.0, -0.25])
    with pytest.raises(VolumeMismatchError):
        classify_2d(G0, g1)
    verdict = classify_2d(G0, g1, fixed_volume=False)
    assert verdict.kind == VerdictKind.UNIQUE_TIMELIKE
    expected = np.log(2.0) * np.eye(2) + np.diag([np.log(4.0), -np.log(4.0)])
    np.testing.assert_allclose(verdict.generator, expected, atol=1e-12)


def test_verdict_is_equivariant(rng):
    for g1, kind in CASES_2D:
        gamma = expm(0.4 * rng.standard_normal((2, 2)))
        gamma /= np.sqrt(abs(np.linalg.det(gamma)))
        moved = classify_2d(act_on_metric(gamma, G0), act_on_metric(gamma, g1))
        assert moved.kind == kind
        if moved.generator is not None:
            original = classify_2d(G0, g1).generator
            np.testing.assert_allclose(moved.generator, gamma @ original @ np.linalg.inv(gamma), atol=1e-8)


@pytest.mark.slow
def test_two_dimensional_verdicts_match_matrix_logarithm():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        g0, g1 = _random_unimodular(rng), _random_unimodular(rng)
        verdict = classify_2d(g0, g1)
        log = logm(relating_endomorphism(g0, g1))
        real_log = np.abs(np.imag(log)).max() <= 1e-8
        assert verdict.connected == real_log, (g0, g1)
        if real_log:
            np.testing.assert_allclose(verdict.generator, np.real(log), rtol=1e-6, atol=1e-6)


def test_de_sitter_picture(rng):
    g = _random_unimodular(rng)
    point = to_de_sitter(g)
    for key, value in point.residuals().items():
        assert value <= 1e-10, key
    assert de_sitter_product(point, point) == pytest.approx(1.0)
    np.testing.assert_allclose(from_de_sitter(point).matrix, g, atol=1e-12)
    for vec in light_cone(point).values():
        assert vec @ g @ vec == pytest.approx(0.0, abs=1e-10)


def test_de_sitter_needs_unit_volume():
    with pytest.raises(VolumeMismatchError):
        to_de_sitter(np.diag([2.0, -2.0]))
    with pytest.raises(DimensionMismatchError):
        to_de_sitter(np.diag([1.0, 1.0, -1.0]))


def test_lorentz_product_validation():
    with pytest.raises(SchemaError):
        LorentzProduct.from_matrix([[1.0, 0.5], [0.0, -1.0]])
    with pytest.raises(SignatureMismatchError):
        LorentzProduct.from_matrix(np.eye(2))
    with pytest.raises(SchemaError):
        LorentzProduct.from_matrix([[1.0]])
    with pytest.raises(SchemaError):
        LorentzProduct.from_json({"values": [[1, 0], [0, -1]]})
    g = LorentzProduct.from_json({"matrix": [[4, 0], [0, -1]], "normalize": True})
    assert abs(g.det) == pytest.approx(1.0)
    assert g.normalized


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        relating_endomorphism(G0, np.diag([1.0, 1.0, -1.0]))


def test_lorentz_gauge(rng):
    G0_, _ = random_lorentz_pair(rng, 4)
    B = lorentz_gauge(G0_)
    np.testing.assert_allclose(B.T @ G0_ @ B, np.diag([1.0, 1.0, 1.0, -1.0]), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_random_pairs_are_lorentzian_and_connected(rng, n):
    g0, g1 = random_lorentz_pair(rng, n)
    LorentzProduct.from_matrix(g0)
    LorentzProduct.from_matrix(g1)
    np.testing.assert_allclose(g1, g1.T)


def test_geodesic_keeps_signature():
    verdict = classify_2d(G0, CASES_2D[2][0])
    for t in np.linspace(0.0, 1.0, 11):
        assert connecting_geodesic(verdict, t).n == 2


@pytest.mark.parametrize("k,t", [(2.0, 0.3), (0.5, 0.8), (1.0, 1.7)])
def test_nilpotent_path(k, t):
    x = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    log = np.log(k) * np.eye(3) + x - 0.5 * x @ x
    np.testing.assert_allclose(nilpotent_path(k, x, t), expm(t * log), atol=1e-12)


def test_definite_geodesic():
    g0 = np.array([[2.0, 0.3], [0.3, 1.0]])
    g1 = np.array([[1.0, -0.2], [-0.2, 3.0]])
    np.testing.assert_allclose(definite_geodesic(g0, g1, 0.0), g0, atol=1e-12)
    np.testing.assert_allclose(definite_geodesic(g0, g1, 1.0), g1, atol=1e-10)
    a = definite_log(g0, g1)
    Ga = g0 @ a
    np.testing.assert_allclose(Ga, Ga.T, atol=1e-12)


@pytest.mark.parametrize("r,s", [(1, 1), (2, 1), (3, 1), (2, 2), (4, 0)])
def test_symmetric_space_signature(r, s):
    result = symmetric_space_signature(r, s)
    assert result["numeric"] == result["expected"]
