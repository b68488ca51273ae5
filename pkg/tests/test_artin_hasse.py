from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mu2lab.artin_hasse import (
    artin_hasse,
    artin_hasse_rational,
    deformed_ep,
    ep_closed_form,
    ep_witt,
    universal_ep,
    universal_ep_from_definition,
)
from mu2lab.dvr import Dvr, DvrSpec, QuotientRing
from mu2lab.polyalg import Algebra
from mu2lab.witt import WittVector, kernel_F_minus_teich, verschiebung


def test_leading_coefficients():
    assert artin_hasse_rational(2, 4)[:2] == (1, 1)
    assert artin_hasse(3, 6)[0] == artin_hasse(3, 6).ring.one


@pytest.mark.parametrize("p", [2, 3, 5])
def test_p_integral(p):
    assert all(Fraction(c).denominator % p for c in artin_hasse_rational(p, 3 * p))


@pytest.mark.parametrize("p,D", [(2, 8), (3, 9), (5, 6)])
def test_two_constructions_agree(p, D):
    assert universal_ep(p, D) == universal_ep_from_definition(p, D)


R3 = Dvr.of(DvrSpec.equal_char(3))
residues = st.lists(st.integers(0, 2), max_size=6).map(lambda d: R3(d).raw)


@settings(max_examples=30, deadline=None)
@given(residues)
def test_zero_a_gives_one(mu):
    E = deformed_ep(R3.zero, mu, 6, R3)
    assert E.trimmed() == [R3.one]


@settings(max_examples=30, deadline=None)
@given(residues)
def test_lambda_zero_degenerates(a):
    D = 6
    E = deformed_ep(a, R3.zero, D, R3)
    base = artin_hasse_rational(3, D)
    want = [R3.mul(R3.from_fraction(c), R3.pow(a, k)) for k, c in enumerate(base)]
    assert list(E.coeffs) == want


def test_closed_form_p3():
    q = QuotientRing(R3, 4)
    a, mu = q.reduce(R3([0, 1, 2])), q.reduce(R3.uniformizer())
    E = ep_closed_form(a, mu, q)
    half = q.from_fraction(Fraction(1, 2))
    assert E.coeffs == (q.one, a, q.mul(half, q.mul(a, q.sub(a, mu))))


def test_closed_form_matches_series_on_kernel():
    q = QuotientRing(R3, 2)
    mu = R3.uniformizer()
    for v in kernel_F_minus_teich(q, mu, 1):
        a = v.entries[0]
        series = deformed_ep(a, q.reduce(mu), 8, q)
        # P_{μ,1}(T) = T^3 in characteristic 3, so reduction is truncation
        assert series.coeffs[:3] == ep_closed_form(a, q.reduce(mu), q).coeffs


def test_p2_small_mu():
    R = Dvr.of(DvrSpec.equal_char(2))
    q = QuotientRing(R, 3)
    mu = q.reduce(R.uniformizer())
    for a in q.residues():
        if q.eq(q.mul(a, a), q.mul(mu, a)) and q.val(a) >= 2:
            E = deformed_ep(a, mu, 6, q)
            assert E.coeffs[:2] == (q.one, a) and E.is_polynomial_below(2)


def test_ep_witt_single_factors():
    q = QuotientRing(R3, 3)
    mu = q.reduce(R3.uniformizer())
    b = q.reduce(R3([0, 1]))
    assert ep_witt(WittVector(q, [b]), mu, 8) == deformed_ep(b, mu, 8, q)
    shifted = ep_witt(verschiebung(WittVector(q, [b])), mu, 8)
    assert shifted == deformed_ep(b, q.pow(mu, 3), 2, q).substitute_power(3, 8)


def test_ep_witt_is_homomorphism():
    R = Dvr.of(DvrSpec.equal_char(2))
    q = QuotientRing(R, 2)
    mu = R.uniformizer() ** 2
    alg = Algebra(q, ["U", "V"])
    U, V = alg.gens()
    m = alg.const(q.reduce(mu))
    kernel = kernel_F_minus_teich(q, mu, 2)
    assert len(kernel) == 4
    for a in kernel:
        E = ep_witt(a, q.reduce(mu), 16)
        assert E.is_polynomial_below(8)
        c = E.trimmed()
        assert alg.eval_univariate(c, U) * alg.eval_univariate(c, V) == alg.eval_univariate(c, U + V + m * U * V)
