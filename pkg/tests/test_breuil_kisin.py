import pytest
from hypothesis import given, settings, strategies as st

from mu2lab.breuil_kisin import (
    BKRing,
    BKTriple,
    bk_build_module,
    bk_check,
    bk_enumerate,
    bk_equivalent,
    bk_table,
    cross_check_counts,
    frobenius,
)
from mu2lab.dvr import DvrSpec
from mu2lab.errors import ConfigMismatch, InsufficientPrecision, Unsupported, WitnessNotFound

E2 = BKRing.from_spec(DvrSpec.mixed_char(3, e=2))
Z9 = BKRing.from_spec(DvrSpec.cyclotomic(3, 2))


def test_frobenius():
    assert frobenius((1, 2, 0, 1), 3) == (1, 0, 0, 2, 0, 0, 0, 0, 0, 1)


def test_F_of_eisenstein():
    assert E2.F == (2,)  # E = u^2 - 3, F = -1
    assert Z9.F == (1, 0, 0, 1, 2, 2)


def test_trivial_triple():
    t = BKTriple(0, 0, (), E2)
    assert bk_check(t)
    mod = bk_build_module(t)
    assert mod.relation == "u^0 e1 = p e2"
    assert mod.phi_e1 == ((1,), ()) and mod.phi_e2 == ((), (1,))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_a(n):
    for m in range(n, Z9.bound + 1):
        assert bool(bk_check(BKTriple(n, m, (), Z9))) == (m >= 3 * n)


def test_e2_exhaustive():
    found = [(t.n, t.m) for t in bk_enumerate(E2)]
    assert found == [(0, 0), (0, 1)]
    # cell (1,1) has no solution: brute force over all a mod u^3
    assert not any(bk_check(BKTriple(1, 1, a, E2)) for a in _all(3, 3))


def _all(p, k):
    import itertools
    return itertools.product(range(p), repeat=k)


def test_small_e_forces_trivial_class():
    ring = BKRing(5, 3, (5, 0, 0, 1))
    assert [t.key() for t in bk_enumerate(ring)] == [(0, 0, ())]


def test_zeta9_triples():
    triples = bk_enumerate(Z9)
    assert len(triples) == 7
    for t in triples:
        assert 0 <= t.n <= t.m <= 3
        mod = bk_build_module(t)
        assert all(mod.checks.values())


lifts = st.lists(st.integers(0, 2), min_size=9, max_size=9).map(tuple)


@settings(max_examples=40, deadline=None)
@given(lifts)
def test_equivalence_granularity(a):
    t = BKTriple(3, 3, a, Z9)
    bumped = BKTriple(3, 3, tuple(a[:3]) + tuple((x + 1) % 3 for x in a[3:]), Z9)
    assert bk_equivalent(t, t) and bk_equivalent(t, bumped)
    assert not bk_equivalent(t, BKTriple(2, 3, a, Z9))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), lifts)
def test_check_and_witness_agree(n, m, a):
    t = BKTriple(n, m, a[: 3 * n], Z9)
    if bk_check(t):
        assert all(bk_build_module(t).checks.values())
    else:
        with pytest.raises(WitnessNotFound):
            bk_build_module(t)


def test_m_below_n_rejected():
    res = bk_check(BKTriple(2, 1, (), Z9))
    assert not res and "n <= m" in res.detail


def test_precision_guard():
    with pytest.raises(InsufficientPrecision):
        bk_check(BKTriple(2, 3, (), Z9), precision=5)


def test_unsupported_and_mismatch():
    with pytest.raises(Unsupported):
        BKRing.from_spec(DvrSpec.mixed_char(2, e=2))
    with pytest.raises(ConfigMismatch):
        BKRing.from_spec(DvrSpec.equal_char(3))


def test_cross_check():
    for spec in (DvrSpec.mixed_char(3, e=2), DvrSpec.cyclotomic(3, 2), DvrSpec.mixed_char(5, e=4)):
        report = cross_check_counts(spec)
        assert report.agree
        assert report.cells[0]["classify"] == report.cells[0]["bk"] == 1


def test_table_shape():
    t = bk_table(Z9)
    assert t["total"] == 7
    assert {(c["n"], c["m"]) for c in t["cells"] if c["count"]} == {
        (0, 0), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (3, 3)}
