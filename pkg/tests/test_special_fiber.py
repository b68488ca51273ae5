import pytest

from mu2lab.classify import canonical_descriptor, enumerate_models, zeta_model_descriptor
from mu2lab.dvr import Dvr, DvrSpec
from mu2lab.group_scheme import ModelDescriptor
from mu2lab.special_fiber import (
    ALPHA_ALPHA,
    MU_MU,
    TRIVIAL_SPLIT,
    ZP_ALPHA_TRIVIAL,
    ZP_ZP,
    c1_coefficients,
    classify_fiber,
    fiber_oracle_agrees,
    fiber_params_alpha_alpha,
    fiber_params_zpzp,
    match_reduction,
    wilson_checks,
)

R2 = Dvr.of(DvrSpec.equal_char(2))
pi = R2.uniformizer()
Z9 = Dvr.of(DvrSpec.cyclotomic(3, 2))


def test_c1():
    assert c1_coefficients(2) == {(1, 1): -1}
    assert c1_coefficients(3) == {(1, 2): -1, (2, 1): -1}


def test_case_tags():
    assert classify_fiber(ModelDescriptor.from_residue(R2(1), R2(1), (), 1)).tag == MU_MU
    split = classify_fiber(ModelDescriptor.from_residue(pi, R2(1), (), 1))
    assert split.tag == TRIVIAL_SPLIT
    assert split.describe() == "trivial extension on special fiber"
    d = canonical_descriptor(Z9, next(c for c in enumerate_models(Z9.spec, 3, 3) if (c.m, c.n) == (3, 1)))
    assert classify_fiber(d).tag == ZP_ALPHA_TRIVIAL


def test_alpha_alpha_params():
    assert fiber_params_alpha_alpha(ModelDescriptor.from_residue(pi ** 2, pi, (0,), 0)) == (0, 0)
    assert fiber_params_alpha_alpha(ModelDescriptor.from_residue(pi ** 4, pi, (0,), 1)) == (0, 0)
    assert fiber_params_alpha_alpha(ModelDescriptor.from_residue(pi ** 2, pi, (0,), 1)) == (1, 0)


def test_lift_independence():
    R = Dvr.of(DvrSpec.equal_char(2, precision=48))
    p = R.uniformizer()
    d = ModelDescriptor.from_residue(p ** 4, p ** 2, (0, 1), 1)
    other = R.elem(d.F[1]) + p ** 2 * (1 + p)
    assert fiber_params_alpha_alpha(d) == fiber_params_alpha_alpha(d, other) == (1, 1)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_zeta_family(j):
    d = zeta_model_descriptor(Z9, j)
    assert fiber_params_zpzp(d) == (0, j)
    fc = classify_fiber(d)
    assert fc.tag == ZP_ZP
    assert fiber_oracle_agrees(d)["agree"]


def test_wilson():
    assert wilson_checks(Z9) == {"factorial": True, "eta_ratio": True}


@pytest.mark.parametrize("spec,mmax,nmax", [
    (DvrSpec.equal_char(2), 4, 1),
    (DvrSpec.cyclotomic(3, 2), 3, 3),
    (DvrSpec.equal_char(3, precision=64), 6, 2),
])
def test_reduction_oracle(spec, mmax, nmax):
    R = Dvr.of(spec)
    for c in enumerate_models(spec, mmax, nmax):
        r = fiber_oracle_agrees(canonical_descriptor(R, c))
        assert r["agree"], (c, r)


def test_reduction_reads_alpha_alpha():
    d = canonical_descriptor(R2, enumerate_models(R2.spec, 2, 1)[-1])
    assert (d.m, d.n) == (2, 1)
    match = match_reduction(d)
    assert match.tag == ALPHA_ALPHA and match.params == {"beta": 1, "gamma": 0}
