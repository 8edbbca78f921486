import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from detsing.germ import GermError, GermPresentation, PolyMatrix, cofactor, maximal_minors, unit_matrix
from detsing.parsing import parse_expression
from detsing.polycore import Polynomial
from detsing.tangent import (
    G_matrix,
    TangentCombination,
    column_generator,
    g_map,
    generator_set,
    row_generator,
    verify_combination,
    witness_DeltaE,
    witness_fjE,
    witness_G,
)

from .strategies import germs
from .test_germ import generic


def E(g, text):
    return parse_expression(text, g.varnames)


def test_g_map_identities(wh):
    M = wh.matrix
    I3, I2 = PolyMatrix.identity(3, 3), PolyMatrix.identity(2, 3)
    Z3, Z2 = PolyMatrix.zeros(3, 3, 3), PolyMatrix.zeros(2, 2, 3)
    assert g_map(I3, Z2, M) == M
    assert g_map(Z3, I2, M) == M
    for j in (1, 2, 3):
        Ejj = unit_matrix(3, 3, j, j, 3)
        assert g_map(Ejj, Z2, M) == column_generator(wh, j, j)


def test_column_and_row_generators_match_g_map(wh):
    M = wh.matrix
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            A = unit_matrix(3, 3, j, i, 3)
            assert g_map(A, PolyMatrix.zeros(2, 2, 3), M) == column_generator(wh, i, j)
    for l in (1, 2):
        for k in (1, 2):
            B = unit_matrix(2, 2, l, k, 3)
            assert g_map(PolyMatrix.zeros(3, 3, 3), B, M) == row_generator(wh, l, k)


def test_zero_matrix_generators(zero12):
    gens = generator_set(zero12)
    assert all(m.is_zero() for m in gens.all_matrices())


def test_generic34_fjE_pattern():
    g = generic(3, 4)
    c = witness_fjE(g, 1, 1, 2)
    assert verify_combination(c, g)
    f1 = maximal_minors(g)[1]
    assert c.target == unit_matrix(3, 4, 1, 2, g.r).scale(f1)
    for s in (2, 3, 4):
        assert c.ccoeffs[2, s] == cofactor(g, 1, 1, s)
    nonzero = {(i, j) for i in range(1, 5) for j in range(1, 5) if not c.ccoeffs[i, j].is_zero()}
    assert nonzero == {(2, 2), (2, 3), (2, 4)}
    A = c.expand(g)
    assert A[1, 2] == f1 and A[2, 2].is_zero() and A[3, 2].is_zero()
    assert all(A[i, t].is_zero() for i in (1, 2, 3) for t in (1, 3, 4))


def test_fjE_row_vector(line):
    c = witness_fjE(line, 2, 1, 1)
    assert verify_combination(c, line)
    assert c.target.to_strings(line.varnames) == [["x", "0"]]
    assert c.ccoeffs[1, 1] == Polynomial.one(2)


def test_fjE_weighted(wh):
    c = witness_fjE(wh, 1, 1, 1)
    assert verify_combination(c, wh)
    assert c.target[1, 1] == E(wh, "y^2 - x^3*z")


def test_G_row_vector(line):
    c = witness_G(line, 2, 1, 1, 1)
    assert verify_combination(c, line)
    assert c.target.to_strings(line.varnames) == [["1", "0"]]


def test_DeltaE_row_vector(line):
    c = witness_DeltaE(line, 1, 2, 1, 2, 1, 1)
    assert verify_combination(c, line)
    assert c.target.to_strings(line.varnames) == [["-1", "0"]]


@given(germs(ns=(2,), rs=(4,)), st.integers(1, 4))
def test_2x3_G_coefficients_match_the_hand_construction(g, gamma):
    """For j=2, l=1, k=1 the coefficients are the hand-derived 2x3 ones."""
    c = witness_G(g, 2, 1, gamma, 1)
    d = gamma - 1
    m = g.entry
    assert verify_combination(c, g)
    assert c.jcoeffs[d] == cofactor(g, 2, 1, 1)
    assert all(c.jcoeffs[v].is_zero() for v in range(4) if v != d)
    expected_c = {
        (1, 1): cofactor(g, 2, 1, 1).derivative(d),
        (1, 3): cofactor(g, 2, 1, 3).derivative(d),
        (2, 2): cofactor(g, 1, 1, 2).derivative(d),
        (2, 3): cofactor(g, 1, 1, 3).derivative(d),
    }
    for i in range(1, 4):
        for j in range(1, 4):
            assert c.ccoeffs[i, j] == expected_c.get((i, j), Polynomial.zero(4))
    expected_r = {(1, 2): -m(1, 3).derivative(d), (2, 2): -m(2, 3).derivative(d)}
    for l in (1, 2):
        for k in (1, 2):
            assert c.rcoeffs[l, k] == expected_r.get((l, k), Polynomial.zero(4))
    f = maximal_minors(g)
    assert c.target[1, 1] == f[2].derivative(d) and c.target[1, 2] == f[1].derivative(d)


def test_perturbed_certificate_fails(wh):
    c = witness_fjE(wh, 2, 1, 3)
    one = Polynomial.one(3)
    bumped = TangentCombination(
        c.target, c.jcoeffs, c.ccoeffs + unit_matrix(3, 3, 1, 1, 3).scale(one), c.rcoeffs
    )
    assert not verify_combination(bumped, wh)


def test_zero_certificate(wh):
    assert verify_combination(TangentCombination.zero(wh), wh)


def test_bad_certificate_shape(wh, line):
    with pytest.raises(GermError):
        verify_combination(TangentCombination.zero(line), wh)


def test_witness_index_errors(wh):
    with pytest.raises(GermError):
        witness_G(wh, 1, 1, 1, 1)
    with pytest.raises(GermError):
        witness_DeltaE(wh, 1, 2, 1, 1, 1, 1)
    with pytest.raises(GermError):
        witness_fjE(wh, 1, 3, 1)


@given(germs(), st.randoms(use_true_random=False))
def test_fjE_certificates(g, rnd):
    j, l, k = rnd.randint(1, g.p), rnd.randint(1, g.p), rnd.randint(1, g.n)
    c = witness_fjE(g, j, k, l)
    assert verify_combination(c, g)
    assert c.jet_coefficients_in_maximal_ideal()


@given(germs(), st.randoms(use_true_random=False))
def test_G_certificates(g, rnd):
    j, l = rnd.sample(range(1, g.p + 1), 2)
    gamma, k = rnd.randint(1, g.r), rnd.randint(1, g.n)
    c = witness_G(g, j, l, gamma, k)
    assert verify_combination(c, g)
    assert c.target == G_matrix(g, j, l, gamma, k)


@given(germs(), st.randoms(use_true_random=False))
def test_DeltaE_certificates(g, rnd):
    q, s = rnd.sample(range(1, g.p + 1), 2)
    gamma, nu = rnd.sample(range(1, g.r + 1), 2)
    k, l = rnd.randint(1, g.n), rnd.randint(1, g.p)
    assert verify_combination(witness_DeltaE(g, q, s, gamma, nu, k, l), g)


@given(germs(ns=(1, 2)), st.randoms(use_true_random=False))
def test_certificates_are_linear(g, rnd):
    a = witness_fjE(g, 1, 1, rnd.randint(1, g.p))
    b = witness_fjE(g, 2, g.n, rnd.randint(1, g.p))
    assert verify_combination(a + b.scale(3), g)
    assert verify_combination(a - b, g)
