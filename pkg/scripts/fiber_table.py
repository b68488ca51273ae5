"""Special fiber type of every model in a small classification table,
with the reduction check alongside.

    python3 scripts/fiber_table.py
"""
from mu2lab.classify import canonical_descriptor, enumerate_models
from mu2lab.dvr import Dvr, DvrSpec
from mu2lab.special_fiber import classify_fiber, fiber_oracle_agrees

for spec, mmax, nmax in [(DvrSpec.equal_char(2), 4, 1), (DvrSpec.equal_char(3), 3, 1),
                         (DvrSpec.mixed_char(3, e=2), 1, 1)]:
    R = Dvr.of(spec)
    print(spec.describe())
    for c in enumerate_models(spec, mmax, nmax):
        d = canonical_descriptor(R, c)
        agree = fiber_oracle_agrees(d)["agree"]
        label = f"m={c.m} n={c.n} a={list(c.a)}"
        print(f"  {label:<28} {classify_fiber(d).describe():<40} {'ok' if agree else 'MISMATCH'}")
