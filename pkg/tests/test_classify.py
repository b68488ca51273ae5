import pytest
from hypothesis import given, settings, strategies as st

from mu2lab.classify import (
    CanonicalModel,
    canonical_descriptor,
    canonicalize_model,
    classification_table,
    enumerate_models,
    eta_element,
    hom_models,
    hom_models_search,
    iso_test,
    ker_p2_predicted,
    lambda_2,
    p2_projection,
    p2_surjective_predicted,
    phi_bruteforce,
    phi_enumerate,
    rad_from_phi,
    zeta_model_descriptor,
)
from mu2lab.dvr import Dvr, DvrSpec, QuotientRing
from mu2lab.errors import InsufficientPrecision, NoRootOfUnity, NotAModel
from mu2lab.group_scheme import ModelDescriptor, build_model, verify_hopf

R2 = Dvr.of(DvrSpec.equal_char(2))
R3 = Dvr.of(DvrSpec.equal_char(3))
Z9 = Dvr.of(DvrSpec.cyclotomic(3, 2))
pi2, pi3, z = R2.uniformizer(), R3.uniformizer(), Z9.uniformizer()


def test_phi_unit_lambda():
    assert [x.j for x in phi_enumerate(pi3, R3(1))] == [0, 1, 2]


def test_phi_unit_mu():
    assert len(phi_enumerate(R3(1), pi3)) == 1


def test_phi_p2_example():
    assert len(phi_enumerate(pi2 ** 4, pi2)) == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2))
def test_phi_matches_bruteforce_p3(m, n):
    mu, lam = pi3 ** m, pi3 ** n
    assert phi_enumerate(mu, lam) == phi_bruteforce(mu, lam)


def test_rad_models_are_hopf():
    mu, lam = pi3 ** 3, pi3
    for x in phi_enumerate(mu, lam):
        rad_from_phi(x, mu, lam)
        if x.j:
            d = ModelDescriptor.from_residue(mu, lam, x.a, x.j)
            assert verify_hopf(build_model(d)).ok


def test_p2_mixed_small_mu():
    mu, lam = z, z ** 2
    assert not p2_projection(phi_enumerate(mu, lam)).surjective
    assert p2_surjective_predicted(mu, lam) is False


@pytest.mark.parametrize("m,n", [(2, 1), (3, 2), (3, 1), (2, 2)])
def test_p2_kernel_zeta9(m, n):
    mu, lam = z ** m, z ** n
    assert p2_projection(phi_enumerate(mu, lam)).kernel == ker_p2_predicted(mu, lam)


def test_eta_at_p2_is_lambda2():
    Z4 = Dvr.of(DvrSpec.cyclotomic(2, 2))
    assert eta_element(Z4) == lambda_2(Z4)


def test_no_root_of_unity():
    with pytest.raises(NoRootOfUnity):
        eta_element(Dvr.of(DvrSpec.mixed_char(3, e=2)))


def test_canonical_form_of_limit_case():
    d = ModelDescriptor(pi2 ** 2, pi2, (R2.one,), 1)
    assert canonicalize_model(d) == CanonicalModel(2, 1, (0,))


def test_j_zero_is_not_a_model():
    with pytest.raises(NotAModel):
        canonicalize_model(ModelDescriptor.from_residue(pi2 ** 2, pi2, (0,), 0))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(enumerate_models(DvrSpec.equal_char(3), 6, 1)), st.sampled_from([1, 2]))
def test_rescaling_j_keeps_class(c, j):
    d = canonical_descriptor(R3, c)
    q = QuotientRing(R3, c.n)
    b = q.mul(tuple(c.a), q.from_int(j)) if c.n else ()
    dj = ModelDescriptor.from_residue(d.mu, d.lam, b, j)
    assert canonicalize_model(dj) == c
    assert iso_test(d, dj)


def test_iso_examples():
    d21 = canonical_descriptor(R2, CanonicalModel(2, 1, (0,)))
    d31 = canonical_descriptor(R2, CanonicalModel(3, 1, (0,)))
    assert iso_test(d21, d21) and not iso_test(d21, d31)
    shifted = ModelDescriptor(d21.mu, d21.lam, (d21.F[0], R2.add(d21.F[1], pi2.raw)), 1)
    assert iso_test(d21, shifted)


def test_hom_tags():
    d = canonical_descriptor(R2, CanonicalModel(2, 1, (0,)))
    assert hom_models(d, d).tag == "Z/p^2Z"
    d00 = canonical_descriptor(R2, CanonicalModel(0, 0, ()))
    assert hom_models(d00, d).tag == "0"
    assert hom_models_search(d00, d).tag == "0"


def test_enumerate_trivial_bounds():
    assert enumerate_models(DvrSpec.equal_char(2), 0, 0) == [CanonicalModel(0, 0, ())]


def test_enumerate_p2_cells():
    cells = {(c.m, c.n) for c in enumerate_models(DvrSpec.equal_char(2), 4, 1)}
    assert cells == {(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (2, 1), (3, 1), (4, 1)}
    assert all(m >= 2 * n for m, n in cells)


def test_zeta9_class_is_enumerated():
    c = canonicalize_model(zeta_model_descriptor(Z9, 1))
    assert c in enumerate_models(Z9.spec, 3, 3)
    assert (c.m, c.n) == (3, 3)


def test_table_and_precision():
    t = classification_table(DvrSpec.equal_char(2), 2, 1)
    assert t["total"] == sum(cell["count"] for cell in t["cells"])
    with pytest.raises(InsufficientPrecision):
        enumerate_models(DvrSpec.equal_char(2, precision=8), 9, 0)
