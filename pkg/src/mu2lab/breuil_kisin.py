"""Linear-algebra side of the classification: φ-modules over W₂[[u]].

A model of μ_{p²} over a mixed-characteristic ring with odd p corresponds
to a triple (n, m, a) with a ∈ k[[u]], subject to two congruences.  Here
k = F_p, so Frobenius on coefficients is the identity and φ only sends
u to u^p.  Polynomials are coefficient tuples, constant term first.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .dvr import DvrSpec
from .errors import ConfigMismatch, InsufficientPrecision, SearchSpaceTooLarge, Unsupported, WitnessNotFound

SEARCH_LIMIT = 2_000_000


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _add(a, b, mod):
    n = max(len(a), len(b))
    return _trim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % mod for i in range(n))


def _neg(a, mod):
    return tuple((-x) % mod for x in a)


def _mul(a, b, mod):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(x % mod for x in out)


def _shift(a, k):
    """Multiply by u^k (k may be negative only when the low terms vanish)."""
    if k >= 0:
        return _trim((0,) * k + tuple(a)) if a else ()
    if any(a[:-k]):
        raise ArithmeticError(f"not divisible by u^{-k}")
    return _trim(a[-k:])


def _mod_u(a, k):
    return _trim(a[:k])


def _mono(k, c=1):
    return (0,) * k + (c,)


def frobenius(a, p):
    """φ on k[u] with k = F_p: u ↦ u^p."""
    if not a:
        return ()
    out = [0] * (p * (len(a) - 1) + 1)
    for i, c in enumerate(a):
        out[p * i] = c
    return _trim(out)


@dataclass(frozen=True)
class BKRing:
    """Ambient data: odd p, ramification e and the Eisenstein polynomial E(u)."""

    p: int
    e: int
    eisenstein: tuple

    def __post_init__(self):
        if self.p == 2:
            raise Unsupported("p=2 is outside the φ-module classification; "
                              "only unipotent models are reachable there")
        if len(self.eisenstein) != self.e + 1 or self.eisenstein[-1] != 1:
            raise ConfigMismatch("E(u) must be monic of degree e")

    @classmethod
    def from_spec(cls, spec: DvrSpec) -> "BKRing":
        if not spec.mixed:
            raise ConfigMismatch("φ-modules need a mixed-characteristic ring")
        return cls(spec.p, spec.e, tuple(spec.eisenstein))

    @property
    def F(self):
        """F(u) mod p, where E(u) = u^e + pF(u)."""
        p = self.p
        return _trim((c // p) % p for c in self.eisenstein[:-1])

    @property
    def E_w2(self):
        return _trim(c % self.p**2 for c in self.eisenstein)

    @property
    def bound(self) -> int:
        return self.e // (self.p - 1)

    def cells(self):
        return [(n, m) for n in range(self.bound + 1) for m in range(n, self.bound + 1)]

    def describe(self) -> dict:
        return {"p": self.p, "e": self.e, "eisenstein": list(self.eisenstein)}


@dataclass(frozen=True, order=True)
class BKTriple:
    """(n, m, a) with a given by a working lift modulo u^{pn}."""

    n: int
    m: int
    a: tuple
    ring: BKRing = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", _trim(x % self.ring.p for x in self.a))

    @property
    def reduced(self) -> tuple:
        return _mod_u(self.a, self.n)

    def key(self):
        return (self.n, self.m, self.reduced)

    def as_dict(self):
        return {"n": self.n, "m": self.m, "a": list(self.reduced), "lift": list(self.a)}


@dataclass
class CheckResult:
    ok: bool
    detail: str = ""

    def __bool__(self):
        return self.ok


def _conditions(ring: BKRing, n: int, m: int, a: tuple):
    """Return (A.1 residue, A.2 difference), both reduced to the relevant power of u."""
    p, e = ring.p, ring.e
    pa = frobenius(a, p)
    c1 = _mod_u(pa, n)
    lhs = _add(_shift(pa, e - m * (p - 1)), _neg(_shift(a, e), p), p)
    c2 = _mod_u(_add(lhs, _neg(_shift(ring.F, m), p), p), p * n)
    return c1, c2


def bk_check(t: BKTriple, precision: int | None = None) -> CheckResult:
    ring, n, m = t.ring, t.n, t.m
    p = ring.p
    if precision is not None and precision < p * n + ring.e:
        raise InsufficientPrecision(f"u-adic precision {precision} < pn + e = {p * n + ring.e}")
    if not 0 <= n <= m:
        return CheckResult(False, f"need 0 <= n <= m, got n={n}, m={m}")
    if (p - 1) * m > ring.e:
        return CheckResult(False, f"m={m} exceeds e/(p-1)")
    c1, c2 = _conditions(ring, n, m, t.a)
    if c1:
        return CheckResult(False, f"phi(a) mod u^{n} = {list(c1)}")
    if c2:
        return CheckResult(False, f"second congruence off by {list(c2)} mod u^{p * n}")
    return CheckResult(True)


# --- the module 𝔐 = <e1, e2 | u^{m-n} e1 = p e2> -------------------------
#
# Elements are normalized pairs (alpha, beta) meaning alpha·e1 + beta·e2 with
# alpha ∈ F_p[u] and beta ∈ Z/p²[u] having digits in [0, p).  The p-part of
# beta is pushed onto e1 through the relation; this form is unique.

class _Module:
    def __init__(self, ring: BKRing, n: int, m: int):
        self.p, self.q, self.gap = ring.p, ring.p**2, m - n

    def norm(self, alpha, beta):
        p = self.p
        low = tuple(c % p for c in beta)
        high = tuple((c % self.q) // p for c in beta)
        return _add(alpha, _shift(_trim(high), self.gap), p), _trim(low)

    def add(self, x, y):
        return self.norm(_add(x[0], y[0], self.p), _add(x[1], y[1], self.q))

    def scale(self, s, x):
        """s ∈ Z/p²[u] acting on x."""
        sbar = tuple(c % self.p for c in s)
        return self.norm(_mul(sbar, x[0], self.p), _mul(s, x[1], self.q))


@dataclass
class PhiModulePresentation:
    triple: BKTriple
    relation: str
    phi_e1: tuple
    phi_e2: tuple
    coefficient: tuple
    x: tuple
    y: tuple
    checks: dict

    def as_dict(self):
        return {
            "n": self.triple.n, "m": self.triple.m, "a": list(self.triple.a),
            "relation": self.relation,
            "phi_e1": {"e1": list(self.phi_e1[0]), "e2": list(self.phi_e1[1])},
            "phi_e2": {"e1": list(self.phi_e2[0]), "e2": list(self.phi_e2[1])},
            "coefficient": list(self.coefficient),
            "witness_x": list(self.x), "witness_y": list(self.y),
            "checks": dict(self.checks),
        }


def frobenius_coefficient(t: BKTriple) -> tuple:
    """u^{-n}φ(a) − u^{m(p-1)-n}a, which lies in k[u] once φ(a) ≡ 0 mod u^n."""
    p, n, m = t.ring.p, t.n, t.m
    return _add(_shift(frobenius(t.a, p), -n), _neg(_shift(t.a, m * (p - 1) - n), p), p)


def bk_witnesses(t: BKTriple):
    """x, y with E(u)e2 = x·φ(e1) + y·φ(e2); y = u^{e-m(p-1)} and x solves the rest."""
    ring, n, m = t.ring, t.n, t.m
    p, e = ring.p, ring.e
    top = _add(_add(_shift(ring.F, m), _shift(t.a, e), p),
               _neg(_shift(frobenius(t.a, p), e - m * (p - 1)), p), p)
    try:
        x = _shift(top, -p * n)
    except ArithmeticError as exc:
        raise WitnessNotFound(f"F·u^m + u^e·a − u^(e-m(p-1))·φ(a) is not divisible by u^{p * n}") from exc
    return x, _mono(e - m * (p - 1))


def bk_build_module(t: BKTriple) -> PhiModulePresentation:
    res = bk_check(t)
    if not res:
        raise WitnessNotFound(f"triple fails its congruences: {res.detail}")
    ring, n, m = t.ring, t.n, t.m
    p, e = ring.p, ring.e
    M = _Module(ring, n, m)
    e1, e2 = ((1,), ()), ((), (1,))
    b = frobenius_coefficient(t)
    phi1 = (_mono(n * (p - 1)), ())
    phi2 = M.norm(b, _mono(m * (p - 1)))
    x, y = bk_witnesses(t)
    checks = {}
    checks["relation_stable"] = (
        M.scale(_mono(p * (m - n)), phi1) == M.scale((p,), phi2)
    )
    checks["E_e2_in_image"] = M.scale(ring.E_w2, e2) == M.add(M.scale(x, phi1), M.scale(y, phi2))
    checks["E_e1_in_image"] = M.scale(ring.E_w2, e1) == M.scale(_mono(e - n * (p - 1)), phi1)
    if not (checks["E_e2_in_image"] and checks["E_e1_in_image"]):
        raise WitnessNotFound(f"containment of E(u)M fails for {t.key()}")
    return PhiModulePresentation(t, f"u^{m - n} e1 = p e2", phi1, phi2, b, x, y, checks)


def bk_equivalent(t1: BKTriple, t2: BKTriple) -> bool:
    return t1.key() == t2.key()


def _cell_triples(ring: BKRing, n: int, m: int, limit: int = SEARCH_LIMIT):
    p = ring.p
    size = p ** (p * n)
    if size > limit:
        raise SearchSpaceTooLarge(f"cell (n={n}, m={m}) has {size} candidates")
    found = {}
    for digits in itertools.product(range(p), repeat=p * n):
        a = _trim(digits)
        c1, c2 = _conditions(ring, n, m, a)
        if not c1 and not c2:
            t = BKTriple(n, m, a, ring)
            found.setdefault(t.reduced, t)
    return [found[k] for k in sorted(found)]


def _cell_job(args):
    return _cell_triples(*args)


def bk_enumerate(ring: BKRing, workers: int = 1, limit: int = SEARCH_LIMIT):
    """One triple per equivalence class, by exhaustive search of a mod u^{pn}."""
    jobs = [(ring, n, m, limit) for n, m in ring.cells()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    return sorted(itertools.chain.from_iterable(results))


def bk_table(ring: BKRing, workers: int = 1) -> dict:
    triples = bk_enumerate(ring, workers)
    cells = []
    for n, m in ring.cells():
        reps = [list(t.reduced) for t in triples if (t.n, t.m) == (n, m)]
        cells.append({"n": n, "m": m, "count": len(reps), "a": reps})
    return {"ring": ring.describe(), "cells": cells, "total": len(triples)}


@dataclass
class CrossCheckReport:
    ring: dict
    cells: list
    mismatches: list

    @property
    def agree(self) -> bool:
        return not self.mismatches

    def as_dict(self):
        return {"ring": self.ring, "agree": self.agree, "cells": self.cells, "mismatches": self.mismatches}


def cross_check_counts(spec: DvrSpec, workers: int = 1) -> CrossCheckReport:
    """Per-cell counts from both classifications; BK cell (n, m) faces cell (m, n)."""
    from .classify import enumerate_models

    ring = BKRing.from_spec(spec)
    bound = ring.bound
    models = enumerate_models(spec, bound, bound, workers)
    triples = bk_enumerate(ring, workers)
    cells, mismatches = [], []
    for n, m in ring.cells():
        left = [list(c.a) for c in models if (c.m, c.n) == (m, n)]
        right = [list(t.reduced) for t in triples if (t.n, t.m) == (n, m)]
        row = {"m": m, "n": n, "classify": len(left), "bk": len(right),
               "classify_a": left, "bk_a": right, "agree": len(left) == len(right)}
        cells.append(row)
        if not row["agree"]:
            mismatches.append({"m": m, "n": n, "classify": len(left), "bk": len(right)})
    return CrossCheckReport(spec.describe(), cells, mismatches)
