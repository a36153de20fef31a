from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.clifford import (CliffordElement, Signature, adjoint_action, all_blades, blade_product,
                              geometric_product, inner, inverse_vector, multiplication_table, volume_element)
from utils.errors import NullVectorError, SchemaError, SignatureMismatchError

SIGNATURES = [Signature(r, n - r) for n in range(1, 7) for r in range(n + 1)]


@pytest.mark.parametrize("sig", SIGNATURES, ids=str)
def test_generator_relation_is_exact(sig):
    for i in range(1, sig.n + 1):
        for j in range(1, sig.n + 1):
            ei, ej = CliffordElement.basis(sig, i), CliffordElement.basis(sig, j)
            metric = 2 * sig.epsilon(i) if i == j else 0
            assert ei * ej + ej * ei + CliffordElement.scalar(sig, metric) == CliffordElement(sig, {})


@pytest.mark.parametrize("sig", [Signature(3, 0), Signature(1, 2), Signature(2, 2)], ids=str)
def test_product_is_associative_on_blades(sig):
    blades = all_blades(sig)
    for a in blades[::3]:
        for b in blades[::2]:
            for c in blades[::5]:
                A, B, C = (CliffordElement(sig, {x: Fraction(1)}) for x in (a, b, c))
                assert (A * B) * C == A * (B * C)


def test_blade_product_signs():
    sig = Signature(1, 1)
    assert blade_product((1,), (1,), sig) == (-1, ())
    assert blade_product((2,), (2,), sig) == (1, ())
    assert blade_product((2,), (1,), sig) == (-1, (1, 2))
    assert blade_product((1, 2), (1, 2), sig) == (1, ())


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3), st.integers(0, 3))
def test_vector_squares_to_minus_norm(components, r):
    sig = Signature(r, 3 - r)
    v = CliffordElement.vector(sig, [Fraction(c) for c in components])
    assert v * v == CliffordElement.scalar(sig, -inner(v, v))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4),
       st.lists(st.integers(-4, 4), min_size=4, max_size=4), st.integers(0, 4))
def test_adjoint_action_matches_conjugation(vc, wc, r):
    sig = Signature(r, 4 - r)
    v = CliffordElement.vector(sig, [Fraction(c) for c in vc])
    w = CliffordElement.vector(sig, [Fraction(c) for c in wc])
    if inner(v, v) == 0:
        with pytest.raises(NullVectorError):
            adjoint_action(v, w)
        return
    conj = inverse_vector(v) * w * v
    assert conj == adjoint_action(v, w)
    assert conj.is_vector()


def test_inverse_vector():
    sig = Signature(2, 1)
    v = CliffordElement.vector(sig, [Fraction(1), Fraction(2), Fraction(1)])
    assert v * inverse_vector(v) == CliffordElement.scalar(sig, 1)


def test_null_vector_is_rejected():
    sig = Signature(1, 1)
    null = CliffordElement.basis(sig, 1) + CliffordElement.basis(sig, 2)
    with pytest.raises(NullVectorError):
        inverse_vector(null)
    with pytest.raises(NullVectorError):
        adjoint_action(null, CliffordElement.basis(sig, 1))


def test_reverse_and_grades():
    sig = Signature(3, 0)
    x = CliffordElement(sig, {(): 1, (1,): 2, (1, 2): 3, (1, 2, 3): 4})
    assert x.reverse() == CliffordElement(sig, {(): 1, (1,): 2, (1, 2): -3, (1, 2, 3): -4})
    assert x.grades() == [0, 1, 2, 3]
    assert x.grade_part(2) == CliffordElement(sig, {(1, 2): 3})
    assert not x.is_even()
    assert x.grade_part(2).is_even()


def test_blade_constructor_reorders():
    sig = Signature(3, 0)
    assert CliffordElement.blade(sig, [2, 1]) == CliffordElement(sig, {(1, 2): -1})
    assert CliffordElement.blade(sig, [1, 1]) == CliffordElement.scalar(sig, -1)


@pytest.mark.parametrize("sig", [Signature(2, 0), Signature(1, 1), Signature(3, 1)], ids=str)
def test_multiplication_table_size(sig):
    table = multiplication_table(sig)
    size = 2 ** sig.n
    assert len(table["blades"]) == size
    assert len(table["products"]) == size
    assert all(len(row) == size for row in table["products"])
    assert table["products"][0][0] == {"blade": [], "coef": 1}


def test_volume_element_square():
    # vol² = (-1)^(n(n-1)/2) · prod(-eps_i)
    for sig in SIGNATURES:
        vol = volume_element(sig)
        sign = (-1) ** (sig.n * (sig.n - 1) // 2)
        for e in sig.eps:
            sign *= -e
        assert geometric_product(vol, vol) == CliffordElement.scalar(sig, sign)


def test_signature_validation():
    with pytest.raises(SignatureMismatchError):
        Signature(0, 0)
    with pytest.raises(SignatureMismatchError):
        Signature(-1, 2)
    with pytest.raises(SchemaError):
        Signature.parse("two,one")
    assert Signature.parse("2,1") == Signature(2, 1)


def test_mixed_signatures_are_rejected():
    a = CliffordElement.basis(Signature(2, 0), 1)
    b = CliffordElement.basis(Signature(1, 1), 1)
    with pytest.raises(SignatureMismatchError):
        a * b
    with pytest.raises(SignatureMismatchError):
        CliffordElement(Signature(2, 0), {(2, 1): 1})
