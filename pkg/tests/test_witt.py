import random

import pytest
from hypothesis import given, settings, strategies as st

from mu2lab.dvr import Dvr, DvrSpec, QuotientRing
from mu2lab.errors import CaseNotApplicable, WindowMismatch, WrongPrime
from mu2lab.witt import (
    WittVector,
    frobenius,
    ghost_components,
    ghost_oracle,
    integers_mod,
    kernel_F,
    kernel_F_minus_teich,
    psi_pullback,
    pushforward_p,
    structure_polynomials,
    teichmuller,
    termwise_sum_check,
    tilde_verschiebung,
    verschiebung,
    witt_add,
    witt_mul,
)


def zvec(R, xs):
    return WittVector(R, [R.from_int(x) for x in xs])


def test_sum_polynomials_p2():
    sp = structure_polynomials(2, 2)
    X, Y = sp.X, sp.Y
    assert sp.sum[0] == X[0] + Y[0]
    assert sp.sum[1] == X[1] + Y[1] - X[0] * Y[0]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_ghost_identities(p):
    assert structure_polynomials(p, 3).check_ghost_identities()


vectors = st.sampled_from([2, 3]).flatmap(
    lambda p: st.tuples(st.just(p), st.integers(1, 3)).flatmap(
        lambda pn: st.tuples(st.just(pn[0]),
                             st.lists(st.integers(0, 10**6), min_size=pn[1], max_size=pn[1]),
                             st.lists(st.integers(0, 10**6), min_size=pn[1], max_size=pn[1]))))


@settings(max_examples=80, deadline=None)
@given(vectors)
def test_against_ghost_oracle(t):
    p, a, b = t
    R = integers_mod(p, 8)
    M = p**8
    for op, f in (("add", witt_add), ("mul", witt_mul)):
        got = [x[0] for x in f(zvec(R, a), zvec(R, b)).entries]
        assert got == ghost_oracle(op, a, b, p, M)


@settings(max_examples=50, deadline=None)
@given(vectors)
def test_frobenius_ghost_shift(t):
    p, a, _ = t
    R = integers_mod(p, 8)
    F = [x[0] for x in frobenius(zvec(R, a + [0])).entries]
    g, gF = ghost_components(a + [0], p), ghost_components(F, p)
    assert all((gF[r] - g[r + 1]) % p**8 == 0 for r in range(len(a)))


def test_teichmuller_multiplicative():
    R = integers_mod(3, 5)
    rng = random.Random(7)
    for _ in range(50):
        x, y = R.from_int(rng.randrange(243)), R.from_int(rng.randrange(243))
        assert witt_mul(teichmuller(R, x, 3), teichmuller(R, y, 3)) == teichmuller(R, R.mul(x, y), 3)


def test_verschiebung_of_teichmuller():
    R = integers_mod(2, 4)
    assert verschiebung(teichmuller(R, R.from_int(5), 1)).entries == (R.zero, R.from_int(5))


def test_equal_char_frobenius_is_power_map():
    R = Dvr.of(DvrSpec.equal_char(3))
    pi = R.uniformizer()
    a = WittVector(R, [(pi + 1).raw, (pi * pi).raw])
    assert frobenius(a).entries == ((pi + 1).__pow__(3).raw, (pi**6).raw)


def test_tilde_verschiebung():
    R = integers_mod(2, 6)
    rng = random.Random(3)
    for _ in range(20):
        a = zvec(R, [rng.randrange(64) for _ in range(2)])
        assert all(x[0] % 2 == 0 for x in tilde_verschiebung(a).entries)
    with pytest.raises(WrongPrime):
        tilde_verschiebung(zvec(integers_mod(3, 4), [1]))


def test_window_mismatch():
    R = integers_mod(3, 4)
    with pytest.raises(WindowMismatch):
        witt_add(zvec(R, [1]), zvec(R, [1, 2]))


def test_kernel_examples():
    R2 = Dvr.of(DvrSpec.equal_char(2))
    pi2 = R2.uniformizer()
    assert len(kernel_F_minus_teich(QuotientRing(R2, 1), pi2, 1)) == 1
    assert len(kernel_F_minus_teich(QuotientRing(R2, 0), pi2, 1)) == 1
    R3 = Dvr.of(DvrSpec.equal_char(3))
    assert len(kernel_F_minus_teich(QuotientRing(R3, 2), R3.uniformizer(), 1)) == 3


def test_termwise_sum_negative_control():
    R = Dvr.of(DvrSpec.equal_char(2))
    q = QuotientRing(R, 2)
    one = WittVector(q, [q.one, q.zero])
    assert not termwise_sum_check(one, one)
    assert termwise_sum_check(one, WittVector(q, [q.zero, q.zero]))


def test_pushforward_is_lift_independent():
    R = Dvr.of(DvrSpec.equal_char(2))
    q = QuotientRing(R, 2)
    rng = random.Random(11)
    for a in kernel_F(q, 2):
        base = pushforward_p(a, R.uniformizer() ** 2)
        for _ in range(10):
            offs = [R(rng.randrange(4)) for _ in range(a.n)]
            assert pushforward_p(a, R.uniformizer() ** 2, offsets=offs) == base


def test_psi_pullback_cases():
    R = Dvr.of(DvrSpec.equal_char(2))
    q = QuotientRing(R, 1)
    a = WittVector(q, [q.one])
    assert psi_pullback(a, R.uniformizer()).entries == (q.zero, q.one)
    M = Dvr.of(DvrSpec.mixed_char(3, e=2))
    with pytest.raises(CaseNotApplicable):
        psi_pullback(WittVector(QuotientRing(M, 5), [(0,) * 5]), M.uniformizer())
