"""Classification of extensions and of models of μ_{p²}.

The central object is the finite group Φ_{μ,λ} of pairs (a, j) with
a ∈ R/λ and j ∈ Z/p, taken modulo the subgroup generated by (μ, 0).
Models of μ_{p²} are the pairs with j ≠ 0; after normalising
μ = π^m, λ = π^n and j = 1 they are indexed by canonical triples (m, n, a).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .artin_hasse import TruncatedSeries, ep_closed_form
from .dvr import INF, Dvr, DvrElement, DvrSpec, QuotientRing, cyclotomic_eisenstein, require_precision
from .errors import ConditionCViolated, InsufficientPrecision, NoRootOfUnity, NotAModel, RamificationBound
from .group_scheme import (
    ModelDescriptor,
    build_model,
    generic_fiber_check,
    model_morphisms,
    p_lambda_coeffs,
    psi_rs,
    verify_hopf,
)


def _fin(v):
    return 0 if v == INF else int(v)


@dataclass(frozen=True, order=True)
class PhiElement:
    """A coset (a, j) + <(μ, 0)>; ``a`` is the least residue of its coset."""

    a: tuple
    j: int

    def as_dict(self):
        return {"a": list(self.a), "j": self.j}


@dataclass(frozen=True)
class RadElement:
    """(F, j) with F a homomorphism G_{μ,1} → G_m over R/λ and F^p = (1+μT)^j over R/λ^p."""

    F: TruncatedSeries
    j: int
    mu: DvrElement
    lam: DvrElement

    def key(self):
        return (tuple(self.F.coeffs), self.j)


class PhiContext:
    """Residue rings and constants shared by every Φ_{μ,λ} computation."""

    def __init__(self, mu: DvrElement, lam: DvrElement):
        dvr = mu.ring
        if mu.is_zero() or lam.is_zero():
            raise NotAModel("μ and λ must be nonzero")
        p = dvr.p
        self.dvr, self.p, self.mu, self.lam = dvr, p, mu, lam
        self.m, self.n = int(mu.valuation()), int(lam.valuation())
        if dvr.mixed and (p - 1) * self.m > dvr.e:
            raise RamificationBound(f"(p-1)v(μ) = {(p - 1) * self.m} exceeds v(p) = {dvr.e}")
        if dvr.mixed and (p - 1) * self.n > dvr.e:
            raise RamificationBound(f"(p-1)v(λ) = {(p - 1) * self.n} exceeds v(p) = {dvr.e}")
        # p/μ^{p-1} loses (p-1)m digits at the top
        require_precision(dvr, p * self.n + (p - 1) * self.m)
        self.q = QuotientRing(dvr, self.n)
        self.qp = QuotientRing(dvr, p * self.n)
        self.mu_q = self.q.reduce(mu)
        self.mu_pm1 = mu ** (p - 1)
        self.c = dvr.elem(dvr.div(dvr.from_int(p), self.mu_pm1.raw)) if dvr.mixed else None

    def in_kernel(self, a_lift: DvrElement) -> bool:
        """a^p ≡ μ^{p-1} a modulo λ."""
        return (a_lift**self.p - self.mu_pm1 * a_lift).valuation() >= self.n

    def second_condition(self, a_lift: DvrElement, j: int) -> bool:
        p, n = self.p, self.n
        if self.dvr.mixed:
            x = p * a_lift - j * self.mu - self.c * a_lift**p
        else:
            x = j * self.mu
        return x.valuation() >= p * n

    def coset_rep(self, a) -> tuple:
        q = self.q
        if q.n == 0 or q.is_zero(self.mu_q):
            return tuple(a)
        best, x = tuple(a), tuple(a)
        for _ in range(self.p - 1):
            x = q.add(x, self.mu_q)
            best = min(best, tuple(x))
        return best


def phi_kernel(mu: DvrElement, lam: DvrElement, ctx: PhiContext | None = None):
    """(R/λ)^{F-μ^{p-1}}: residues a with a^p = μ^{p-1} a, found digit by digit.

    The congruence modulo π^k only depends on the first k digits, so
    prefixes that already fail are pruned."""
    ctx = ctx or PhiContext(mu, lam)
    dvr, n = ctx.dvr, ctx.n
    digits = range(dvr.q)
    found = []

    def grow(prefix):
        k = len(prefix)
        if k == n:
            found.append(tuple(prefix))
            return
        for d in digits:
            cand = prefix + [d]
            x = dvr.elem(dvr.from_digits(cand))
            if (x**ctx.p - ctx.mu_pm1 * x).valuation() >= k + 1:
                grow(cand)

    grow([])
    return found


def phi_enumerate(mu: DvrElement, lam: DvrElement, check_group: bool = True):
    """All elements of Φ_{μ,λ}, sorted, one least representative per coset."""
    ctx = PhiContext(mu, lam)
    dvr = ctx.dvr
    out = set()
    for a in phi_kernel(mu, lam, ctx):
        lift = dvr.elem(dvr.from_digits(a))
        for j in range(ctx.p):
            if ctx.second_condition(lift, j):
                out.add(PhiElement(ctx.coset_rep(a), j))
    elems = sorted(out)
    if check_group and not _is_group(elems, ctx):
        raise ArithmeticError(f"Φ at v(μ)={ctx.m}, v(λ)={ctx.n} is not closed under addition")
    return elems


def _is_group(elems, ctx: PhiContext) -> bool:
    present = set(elems)
    if PhiElement(ctx.coset_rep(ctx.q.zero), 0) not in present:
        return False
    q, p = ctx.q, ctx.p
    for x, y in itertools.product(elems, repeat=2):
        z = PhiElement(ctx.coset_rep(q.add(x.a, y.a)), (x.j + y.j) % p)
        if z not in present:
            return False
    return True


def phi_bruteforce(mu: DvrElement, lam: DvrElement):
    """Oracle: test every (a, j) ∈ R/λ × Z/p against the defining congruences."""
    ctx = PhiContext(mu, lam)
    dvr, p, n = ctx.dvr, ctx.p, ctx.n
    out = set()
    for a in ctx.q.residues():
        x = dvr.elem(dvr.from_digits(a))
        if (x**p - x * mu ** (p - 1)).valuation() < n:
            continue
        for j in range(p):
            if dvr.mixed:
                lhs = p * x - j * mu
                rhs = (p * x**p) / (mu ** (p - 1)) if not mu.is_unit() else p * x**p * mu.inverse() ** (p - 1)
                ok = (lhs - rhs).valuation() >= p * n
            else:
                ok = (j * mu).valuation() >= p * n
            if ok:
                out.add(PhiElement(ctx.coset_rep(a), j))
    return sorted(out)


def rad_from_phi(x: PhiElement, mu: DvrElement, lam: DvrElement) -> RadElement:
    """(E_p(a, μ; T), j), with F^p = (1+μT)^j re-checked over (R/λ^p)[T]/(P_{μ,1})."""
    ctx = PhiContext(mu, lam)
    q, qp, p, dvr = ctx.q, ctx.qp, ctx.p, ctx.dvr
    F = ep_closed_form(tuple(x.a), ctx.mu_q, q)
    if q.n == 0:
        return RadElement(TruncatedSeries(q, [q.one] + [q.zero] * (p - 1)), x.j, mu, lam)
    Ft = ep_closed_form(dvr.from_digits(x.a), mu.raw, dvr)
    lifted = TruncatedSeries(qp, [qp.reduce(c) for c in Ft.coeffs], degree=p * p)
    power = TruncatedSeries(qp, [qp.one], degree=p * p)
    for _ in range(p):
        power = power * lifted
    u = TruncatedSeries(qp, [qp.one, qp.reduce(mu)], degree=p * p)
    uj = TruncatedSeries(qp, [qp.one], degree=p * p)
    for _ in range(x.j):
        uj = uj * u
    diff = TruncatedSeries(qp, [qp.sub(a, b) for a, b in zip(power.coeffs, uj.coeffs)])
    P = [qp.reduce(c) for c in p_lambda_coeffs(mu)]
    rem = diff.reduce_monic(P)
    if any(not qp.is_zero(c) for c in rem.coeffs):
        raise ConditionCViolated(f"F^p(1+μT)^(-{x.j}) ≠ 1 for a={x.a}")
    return RadElement(F, x.j, mu, lam)


# -- the projection p₂ ------------------------------------------------------------

@dataclass
class P2Report:
    surjective: bool
    kernel: list

    def as_dict(self):
        return {"surjective": self.surjective, "kernel": [list(k.a) for k in self.kernel]}


def p2_projection(elems) -> P2Report:
    return P2Report(any(x.j for x in elems), sorted(x for x in elems if x.j == 0))


def p2_surjective_predicted(mu: DvrElement, lam: DvrElement):
    """Surjectivity of p₂ read off from valuations; None when the
    prediction needs a primitive p²-th root of unity the ring lacks."""
    dvr = mu.ring
    p, m, n = dvr.p, _fin(mu.valuation()), _fin(lam.valuation())
    if n == 0:
        return True
    if m == 0:
        return False
    if not dvr.mixed:
        return m >= p * n
    if m < n:
        return False
    if m >= p * n:
        return True
    if p * m - n < dvr.e:
        return False
    return True if has_zeta2(dvr) else None


def ker_p2_predicted(mu: DvrElement, lam: DvrElement):
    """Coset representatives of ker p₂ from the valuation criterion (mixed)
    or the Frobenius-kernel description (equal characteristic)."""
    ctx = PhiContext(mu, lam)
    dvr, p, m, n = ctx.dvr, ctx.p, ctx.m, ctx.n
    reps = set()
    for a in ctx.q.residues():
        x = dvr.elem(dvr.from_digits(a))
        v = (x**p - mu ** (p - 1) * x).valuation()
        if dvr.mixed:
            ok = v >= max(p * n + (p - 1) * m - dvr.e, n)
        else:
            ok = v >= n
        if ok:
            reps.add(PhiElement(ctx.coset_rep(a), 0))
    return sorted(reps)


def p2_injective_predicted(mu: DvrElement, lam: DvrElement) -> bool:
    """Mixed characteristic with v(μ) ≥ v(λ): injective iff v(λ) ≤ 1 or v(p) - (p-1)v(μ) < p."""
    dvr = mu.ring
    m, n = _fin(mu.valuation()), _fin(lam.valuation())
    return n <= 1 or dvr.e - (dvr.p - 1) * m < dvr.p


# -- roots of unity and η -----------------------------------------------------------

def _cyclotomic_level(dvr: Dvr):
    if not dvr.mixed:
        return None
    p, e = dvr.p, dvr.e
    k = 1
    while (p - 1) * p ** (k - 1) < e:
        k += 1
    if (p - 1) * p ** (k - 1) != e:
        return None
    return k if tuple(dvr.spec.eisenstein) == cyclotomic_eisenstein(p, k) else None


def has_zeta2(dvr: Dvr) -> bool:
    k = _cyclotomic_level(dvr)
    return k is not None and k >= 2


def zeta2(dvr: Dvr) -> DvrElement:
    """A primitive p²-th root of unity, available when π = ζ_{p^k} - 1 with k ≥ 2."""
    k = _cyclotomic_level(dvr)
    if k is None or k < 2:
        raise NoRootOfUnity("the ring is not recognised as containing a primitive p²-th root of unity")
    p = dvr.p
    z = (1 + dvr.uniformizer()) ** (p ** (k - 2))
    if z ** (p * p) != 1 or z**p == 1:
        raise NoRootOfUnity("1+π is not a root of unity of the expected order")
    return z


def lambda_2(dvr: Dvr) -> DvrElement:
    return zeta2(dvr) - 1


def lambda_1(dvr: Dvr) -> DvrElement:
    return zeta2(dvr) ** dvr.p - 1


def eta_element(dvr: Dvr) -> DvrElement:
    """η = sum_{k=1}^{p-1} (-1)^{k-1}/k λ₂^k, the truncated logarithm of ζ₂."""
    l2 = lambda_2(dvr)
    eta = dvr(0)
    for k in range(1, dvr.p):
        eta = eta + Fraction((-1) ** (k - 1), k) * l2**k
    return eta


def eta_congruence(dvr: Dvr) -> dict:
    """pη - λ₁ against (p/λ₁^{p-1}) η^p modulo λ₁^p."""
    p = dvr.p
    eta, l1 = eta_element(dvr), lambda_1(dvr)
    lhs = p * eta - l1
    rhs = (p * eta**p) / (l1 ** (p - 1))
    need = p * int(l1.valuation())
    require_precision(dvr, need + (p - 1) * int(l1.valuation()))
    return {
        "holds": (lhs - rhs).valuation() >= need,
        "v_eta": eta.valuation(),
        "v_lambda2": lambda_2(dvr).valuation(),
        "v_lambda1": l1.valuation(),
        "modulus_valuation": need,
    }


def zeta_model_descriptor(dvr: Dvr, j: int = 1) -> ModelDescriptor:
    """(λ₁, λ₁, F̃, j) with F̃ = sum_{k<p} (jη)^k/k! T^k; its generic fiber is Z/p²."""
    p = dvr.p
    eta = j * eta_element(dvr)
    l1 = lambda_1(dvr)
    F = tuple((eta**k * Fraction(1, math.factorial(k))).raw for k in range(p))
    return ModelDescriptor(l1, l1, F, j % p)


def check_zeta_model(dvr: Dvr) -> dict:
    d = zeta_model_descriptor(dvr)
    h = build_model(d)
    report = verify_hopf(h)
    l1 = d.mu
    q = QuotientRing.of(l1)
    in_phi = PhiElement(q.reduce(eta_element(dvr)), 1) in set(phi_enumerate(l1, l1))
    return {**eta_congruence(dvr), "hopf": report.ok, "hopf_checks": report.as_dict(),
            "generic_fiber": generic_fiber_check(h), "in_phi": in_phi}


# -- canonical forms and isomorphism ------------------------------------------------

def residue_a(d: ModelDescriptor) -> tuple:
    """The T-coefficient of F̃ modulo λ."""
    q = QuotientRing.of(d.lam)
    return q.reduce(d.F[1]) if len(d.F) > 1 else q.zero


def require_model(d: ModelDescriptor):
    dvr, p = d.ring, d.p
    if d.j % p == 0:
        raise NotAModel("j = 0 gives a split generic fiber")
    m, n = d.m, d.n
    if m == INF or n == INF:
        raise NotAModel("μ and λ must be nonzero")
    if dvr.mixed:
        if m < n or (p - 1) * m > dvr.e:
            raise NotAModel(f"mixed characteristic needs v(λ) ≤ v(μ) and (p-1)v(μ) ≤ v(p), got ({m}, {n})")
    elif m < p * n:
        raise NotAModel(f"equal characteristic needs v(μ) ≥ p·v(λ), got ({m}, {n})")


@dataclass(frozen=True, order=True)
class CanonicalModel:
    m: int
    n: int
    a: tuple

    def as_dict(self):
        return {"m": self.m, "n": self.n, "a": list(self.a)}


def canonicalize_model(d: ModelDescriptor) -> CanonicalModel:
    """(v(μ), v(λ), a') with a' = j^{-1}(π^m/μ)a mod π^n, the data of the
    isomorphic model with μ = π^m, λ = π^n and j = 1."""
    require_model(d)
    dvr, p = d.ring, d.p
    m, n = int(d.m), int(d.n)
    q = QuotientRing(dvr, n)
    unit = dvr.div(dvr.pi_power(m), d.mu.raw)
    jinv = pow(d.j % p, -1, p)
    a = q.mul(q.mul(q.from_int(jinv), q.reduce(unit)), residue_a(d))
    return CanonicalModel(m, n, tuple(a))


def canonical_descriptor(ring: Dvr, c: CanonicalModel) -> ModelDescriptor:
    mu = ring.elem(ring.pi_power(c.m))
    lam = ring.elem(ring.pi_power(c.n))
    return ModelDescriptor.from_residue(mu, lam, tuple(c.a), 1)


def iso_test(d1: ModelDescriptor, d2: ModelDescriptor) -> bool:
    """Equal valuations and a₁ ≡ (j₁/j₂)(μ₁/μ₂) a₂ modulo λ₂."""
    require_model(d1)
    require_model(d2)
    if d1.m != d2.m or d1.n != d2.n:
        return False
    dvr, p = d1.ring, d1.p
    q = QuotientRing.of(d2.lam)
    ratio = q.reduce(dvr.div(d1.mu.raw, d2.mu.raw))
    jj = q.from_int(d1.j * pow(d2.j % p, -1, p))
    rhs = q.mul(q.mul(jj, ratio), residue_a(d2))
    return tuple(residue_a(d1)) == tuple(rhs)


@dataclass
class HomModels:
    tag: str
    pairs: list
    images: dict | None = None

    def as_dict(self):
        out = {"tag": self.tag, "pairs": [list(x) for x in self.pairs]}
        if self.images is not None:
            out["images"] = self.images
        return out


def _tag_for(count: int, p: int) -> str:
    return {1: "0", p: "Z/pZ", p * p: "Z/p^2Z"}.get(count, f"?{count}")


def hom_models(d1: ModelDescriptor, d2: ModelDescriptor, with_images: bool = False) -> HomModels:
    """The structure of Hom(E1, E2) predicted from valuations and the a-congruence."""
    require_model(d1)
    require_model(d2)
    p = d1.p
    if d1.m < d2.n:
        tag, pairs = "0", [(0, 0)]
    else:
        q = QuotientRing.of(d2.lam)
        dvr = d1.ring
        ok = d2.m <= d1.m and d2.n <= d1.n
        if ok:
            ratio = q.reduce(dvr.div(d1.mu.raw, d2.mu.raw))
            jj = q.from_int(d1.j * pow(d2.j % p, -1, p))
            ok = tuple(q.reduce(d1.F[1])) == tuple(q.mul(q.mul(jj, ratio), q.reduce(d2.F[1])))
        if ok:
            tag, pairs = "Z/p^2Z", [(r, s) for r in range(p) for s in range(p)]
        else:
            tag, pairs = "Z/pZ", [(0, s) for s in range(p)]
    images = None
    if with_images:
        h1, h2 = build_model(d1), build_model(d2)
        images = {}
        for r, s in pairs:
            f = psi_rs(d1, d2, r, s, h1, h2)
            images[f"{r},{s}"] = [h1.algebra.format(x) for x in f.images]
    return HomModels(tag, pairs, images)


def hom_models_search(d1: ModelDescriptor, d2: ModelDescriptor) -> HomModels:
    """Explicit search over all ψ_{r,s}, keeping the Hopf morphisms."""
    pairs = model_morphisms(d1, d2)
    return HomModels(_tag_for(len(pairs), d1.p), pairs)


# -- enumeration of models -------------------------------------------------------------

def model_cells(spec: DvrSpec, mmax: int, nmax: int):
    """(m, n) cells worth examining: n ≤ m, and (p-1)m ≤ v(p) in mixed characteristic."""
    p = spec.p
    cells = []
    for n in range(nmax + 1):
        for m in range(n, mmax + 1):
            if spec.mixed and (p - 1) * m > spec.e:
                continue
            cells.append((m, n))
    return cells


def _cell_models(spec: DvrSpec, m: int, n: int):
    dvr = Dvr.of(spec)
    mu = dvr.elem(dvr.pi_power(m))
    lam = dvr.elem(dvr.pi_power(n))
    return [CanonicalModel(m, n, x.a) for x in phi_enumerate(mu, lam) if x.j == 1]


def _cell_job(args):
    return _cell_models(*args)


def enumerate_models(spec: DvrSpec, mmax: int, nmax: int, workers: int = 1):
    """Isomorphism classes of models of μ_{p²} with v(μ) ≤ mmax, v(λ) ≤ nmax."""
    cells = model_cells(spec, mmax, nmax)
    for m, n in cells:
        if spec.cap <= spec.p * n + (spec.p - 1) * m + spec.e:
            raise InsufficientPrecision(f"cell ({m}, {n}) needs more than cap {spec.cap}")
    jobs = [(spec, m, n) for m, n in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]
    return sorted(itertools.chain.from_iterable(results))


def classification_table(spec: DvrSpec, mmax: int, nmax: int, workers: int = 1) -> dict:
    models = enumerate_models(spec, mmax, nmax, workers)
    cells = {}
    for m, n in model_cells(spec, mmax, nmax):
        cells[(m, n)] = [list(c.a) for c in models if (c.m, c.n) == (m, n)]
    return {
        "ring": spec.describe(),
        "bounds": {"mmax": mmax, "nmax": nmax},
        "cells": [{"m": m, "n": n, "count": len(v), "a": v} for (m, n), v in sorted(cells.items())],
        "total": len(models),
    }
