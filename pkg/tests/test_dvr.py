import pytest
from hypothesis import given, settings, strategies as st

from mu2lab.dvr import Dvr, DvrSpec, QuotientRing, cyclotomic_eisenstein, parse_config
from mu2lab.errors import ConfigError, InsufficientPrecision, NonUnit

RINGS = [
    DvrSpec.equal_char(2, precision=12),
    DvrSpec.equal_char(3, precision=12),
    DvrSpec.equal_char(2, q=4, precision=8),
    DvrSpec.mixed_char(3, e=2, precision=6),
    DvrSpec.cyclotomic(3, 2, precision=4),
    DvrSpec.mixed_char(2, [2, 2, 1], precision=6),
]

ring_st = st.sampled_from(RINGS).map(Dvr.of)


def digits_for(R):
    return st.lists(st.integers(0, R.q - 1), min_size=0, max_size=R.cap).map(R)


@st.composite
def triples(draw):
    R = draw(ring_st)
    return tuple(draw(digits_for(R)) for _ in range(3))


@settings(max_examples=60, deadline=None)
@given(triples())
def test_ring_axioms(t):
    a, b, c = t
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@settings(max_examples=60, deadline=None)
@given(triples())
def test_valuation_is_additive(t):
    a, b, _ = t
    v = a.valuation() + b.valuation()
    if v < a.ring.cap:
        assert (a * b).valuation() == v


@settings(max_examples=60, deadline=None)
@given(ring_st.flatmap(lambda R: digits_for(R)))
def test_inverse(a):
    if a.is_unit():
        assert a * a.inverse() == a.ring(1)
    else:
        with pytest.raises(NonUnit):
            a.inverse()


@settings(max_examples=40, deadline=None)
@given(ring_st.flatmap(lambda R: digits_for(R)))
def test_digits_round_trip(a):
    R = a.ring
    assert R(list(a.digits(R.cap))) == a


def test_pi_power_valuation():
    for spec in RINGS:
        R = Dvr.of(spec)
        pi = R.uniformizer()
        assert pi.valuation() == 1
        assert (pi**3).valuation() == 3


def test_p_has_valuation_e():
    R = Dvr.of(DvrSpec.cyclotomic(3, 2))
    assert R.p_element().valuation() == 6
    assert Dvr.of(DvrSpec.equal_char(3)).p_element().is_zero()


def test_cyclotomic_polynomial():
    assert cyclotomic_eisenstein(3, 2) == (3, 9, 18, 21, 15, 6, 1)
    assert cyclotomic_eisenstein(2, 1) == (2, 1)


def test_bad_configs():
    with pytest.raises(ConfigError):
        DvrSpec(p=4)
    with pytest.raises(ConfigError):
        DvrSpec.mixed_char(3, [3, 1, 1])
    with pytest.raises(ConfigError):
        DvrSpec.mixed_char(3, [9, 0, 1])
    with pytest.raises(ConfigError):
        DvrSpec.equal_char(2, q=6)


def test_quotient_ring():
    R = Dvr.of(DvrSpec.equal_char(3))
    q = QuotientRing(R, 2)
    assert q.size == 9
    assert len(list(q.nilpotents())) == 3
    with pytest.raises(InsufficientPrecision):
        QuotientRing(R, R.cap)


def test_parse_config():
    spec = parse_config("p = 3\ncyclotomic = 2  # zeta_9\n")
    assert spec.e == 6 and spec.mixed
    assert parse_config("p=2\nq=4").q == 4
    with pytest.raises(ConfigError):
        parse_config("case=mixed")
