"""Rebuild the model coming from a primitive 9th root of unity and check it.

Prints the congruence for eta, the Hopf checks of the model, the
Wilson-type identities and the special fiber type.
"""
from mu2lab.classify import check_zeta_model, eta_congruence, zeta_model_descriptor
from mu2lab.dvr import Dvr, DvrSpec
from mu2lab.special_fiber import classify_fiber, wilson_checks

R = Dvr.of(DvrSpec.cyclotomic(3, 2))
print("ring:", R.spec.describe())
print("eta:", eta_congruence(R))
report = check_zeta_model(R)
for key, ok in sorted(report["hopf_checks"].items()):
    print(f"  {key:<28} {'ok' if ok else 'FAILED'}")
print("generic fiber is mu_9:", report["generic_fiber"])
print("wilson:", wilson_checks(R))
for j in (1, 2):
    print(f"j={j} fiber:", classify_fiber(zeta_model_descriptor(R, j)).describe())
