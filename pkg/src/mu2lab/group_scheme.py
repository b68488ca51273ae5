"""Hopf-algebra presentations of the group schemes G^(λ), G_{λ,1}, the smooth
extensions E^{(μ,λ;F̃)} and their order-p² kernels E^{(μ,λ;F̃,j)}.

All coordinate rings live over a truncated d.v.r.; comparisons are made
below a precision horizon that accounts for every exact division used in
the construction (see :func:`_horizon`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .artin_hasse import TruncatedSeries, ep_closed_form
from .dvr import INF, Dvr, DvrElement, QuotientRing
from .errors import (
    ConditionCViolated,
    InsufficientPrecision,
    NoCokernelSeries,
    NotDivisible,
    RamificationBound,
    SearchSpaceTooLarge,
)
from .polyalg import Algebra, AlgebraMap, Elem, TensorAlgebra


def _v(x: DvrElement) -> float:
    return x.valuation()


def _horizon(dvr: Dvr, slack: float) -> int:
    """Trusted π-adic precision after divisions totalling ``slack`` digits."""
    if slack == INF:
        slack = 0
    slack = int(slack) + dvr.e
    if dvr.cap < 2 * slack:
        raise InsufficientPrecision(
            f"construction divides by π^{slack - dvr.e}; cap {dvr.cap} must be at least {2 * slack}"
        )
    return dvr.cap - slack


def _fin(x):
    return 0 if x == INF else x


def check_ramification(lam: DvrElement):
    dvr = lam.ring
    if dvr.mixed and lam.valuation() != INF and (dvr.p - 1) * lam.valuation() > dvr.e:
        raise RamificationBound(f"(p-1)v(λ) = {(dvr.p - 1) * lam.valuation()} exceeds v(p) = {dvr.e}")
    if dvr.mixed and lam.valuation() == INF:
        raise RamificationBound("λ = 0 is not allowed in mixed characteristic")


def p_lambda_coeffs(lam: DvrElement, power: int = 1):
    """Raw coefficients of ((1+λT)^{p^power} - 1)/λ^{p^power}, constant term first (monic)."""
    dvr = lam.ring
    P = dvr.p**power
    if lam.is_zero():
        return [dvr.zero] * P + [dvr.one]
    lamP = (lam**P).raw
    out = [dvr.zero]
    for k in range(1, P):
        num = dvr.smul(dvr.pow(lam.raw, k), math.comb(P, k))
        if dvr.is_zero(num):
            out.append(dvr.zero)
        else:
            out.append(dvr.div(num, lamP))
    out.append(dvr.one)
    return out


def poly_from_coeffs(alg: Algebra, coeffs, var: int):
    """sum coeffs[k] x_var^k as a raw dict."""
    out = {}
    for k, c in enumerate(coeffs):
        if not alg.ring.is_zero(c):
            mono = [0] * alg.nvars
            mono[var] = k
            out[tuple(mono)] = c
    return out


@dataclass
class HopfPresentation:
    name: str
    algebra: Algebra
    comult: AlgebraMap
    counit: AlgebraMap
    antipode: AlgebraMap
    rank: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def ring(self):
        return self.algebra.ring

    @property
    def tensor2(self) -> TensorAlgebra:
        return self.comult.dst

    def tensor3(self) -> TensorAlgebra:
        if "_t3" not in self.meta:
            A = self.algebra
            self.meta["_t3"] = TensorAlgebra([A, A, A], ("X", "Y", "Z"))
        return self.meta["_t3"]


def base_algebra(dvr: Dvr, horizon=None) -> Algebra:
    return Algebra(dvr, [], horizon=horizon)


def _make_maps(A: Algebra, delta, delta_units, eps, eps_units, anti, anti_units):
    AA = TensorAlgebra([A, A], ("X", "Y"))
    base = base_algebra(A.ring, A.horizon)
    D = AlgebraMap(A, AA, [d(AA) for d in delta], delta_units)
    E = AlgebraMap(A, base, [base.const(c) for c in eps], eps_units)
    S = AlgebraMap(A, A, anti, anti_units)
    return D, E, S


def _embed(elem: Elem, target: Algebra, var_offset: int, unit_offset: int) -> Elem:
    src = elem.alg
    num = src.embed_poly(elem.num, var_offset, target.nvars)
    den = [0] * len(target.units)
    for i, e in enumerate(elem.den):
        den[unit_offset + i] = e
    return Elem(target, target.reduce(num), tuple(den))


def _shift_units(vec, offset, total):
    out = [0] * total
    for i, v in enumerate(vec):
        out[offset + i] = v
    return out


# -- generic verification -----------------------------------------------------

@dataclass
class HopfReport:
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self):
        return [k for k, v in self.checks.items() if not v]

    def as_dict(self):
        return dict(self.checks)


def verify_hopf(h: HopfPresentation) -> HopfReport:
    A, AA = h.algebra, h.tensor2
    D, E, S = h.comult, h.counit, h.antipode
    nA, uA = A.nvars, len(A.units)
    gens = A.gens()
    checks = {}
    checks["well_defined"] = (D.kills_relations() and E.kills_relations() and S.kills_relations()
                              and not D.check_units() and not E.check_units() and not S.check_units())

    AAA = h.tensor3()
    d_imgs = [D(g) for g in gens]
    left = AlgebraMap(
        AA, AAA,
        [_embed(d, AAA, 0, 0) for d in d_imgs] + [_embed(g, AAA, 2 * nA, 2 * uA) for g in gens],
        [(_shift_units(vec, 0, 3 * uA), c) for vec, c in D.unit_images]
        + [(_shift_units([int(i == k) for i in range(uA)], 2 * uA, 3 * uA), A.ring.one) for k in range(uA)],
    )
    right = AlgebraMap(
        AA, AAA,
        [_embed(g, AAA, 0, 0) for g in gens] + [_embed(d, AAA, nA, uA) for d in d_imgs],
        [(_shift_units([int(i == k) for i in range(uA)], 0, 3 * uA), A.ring.one) for k in range(uA)]
        + [(_shift_units(vec, uA, 3 * uA), c) for vec, c in D.unit_images],
    )
    checks["coassociativity"] = all(left(d) == right(d) for d in d_imgs)

    eps_vals = [E(g) for g in gens]

    def const_of(x):
        return x.num.get((), A.ring.zero) if not x.is_zero() else A.ring.zero

    unit_id = [([int(i == k) for i in range(uA)], A.ring.one) for k in range(uA)]
    eps_units = [([0] * uA, c) for _, c in E.unit_images]
    counit_left = AlgebraMap(AA, A, [A.const(const_of(e)) for e in eps_vals] + gens, eps_units + unit_id)
    counit_right = AlgebraMap(AA, A, gens + [A.const(const_of(e)) for e in eps_vals], unit_id + eps_units)
    checks["counit_left"] = all(counit_left(d) == g for d, g in zip(d_imgs, gens))
    checks["counit_right"] = all(counit_right(d) == g for d, g in zip(d_imgs, gens))

    s_imgs = [S(g) for g in gens]
    anti_left = AlgebraMap(AA, A, s_imgs + gens, list(S.unit_images) + unit_id)
    anti_right = AlgebraMap(AA, A, gens + s_imgs, unit_id + list(S.unit_images))
    checks["antipode_left"] = all(anti_left(d) == A.const(const_of(e)) for d, e in zip(d_imgs, eps_vals))
    checks["antipode_right"] = all(anti_right(d) == A.const(const_of(e)) for d, e in zip(d_imgs, eps_vals))

    swap = AlgebraMap(
        AA, AA,
        [AA.gen(nA + i) for i in range(nA)] + [AA.gen(i) for i in range(nA)],
        [(_shift_units([int(i == k) for i in range(uA)], uA, 2 * uA), A.ring.one) for k in range(uA)]
        + [(_shift_units([int(i == k) for i in range(uA)], 0, 2 * uA), A.ring.one) for k in range(uA)],
    )
    checks["commutative"] = all(swap(d) == d for d in d_imgs)
    if h.rank is not None:
        checks["rank"] = A.rank() == h.rank
    return HopfReport(checks)


def tensor_map(f: AlgebraMap, g: AlgebraMap, src: TensorAlgebra, dst: TensorAlgebra) -> AlgebraMap:
    """f ⊗ g between tensor squares."""
    A1 = f.src
    n1, u1 = A1.nvars, len(A1.units)
    B = f.dst
    nB, uB = B.nvars, len(B.units)
    imgs = [_embed(x, dst, 0, 0) for x in f.images] + [_embed(x, dst, nB, uB) for x in g.images]
    units = [(_shift_units(vec, 0, 2 * uB), c) for vec, c in f.unit_images] + \
            [(_shift_units(vec, uB, 2 * uB), c) for vec, c in g.unit_images]
    return AlgebraMap(src, dst, imgs, units)


def is_hopf_morphism(f: AlgebraMap, h_src: HopfPresentation, h_dst: HopfPresentation) -> bool:
    """f: coordinate ring of h_src → coordinate ring of h_dst (a group map the other way).

    Checks that relations and declared units are respected and that
    Δ_dst ∘ f = (f ⊗ f) ∘ Δ_src on generators.
    """
    if not f.kills_relations() or f.check_units():
        return False
    ff = tensor_map(f, f, h_src.tensor2, h_dst.tensor2)
    for g in h_src.algebra.gens():
        if h_dst.comult(f(g)) != ff(h_src.comult(g)):
            return False
    return True


# -- G^(λ) and G_{λ,1} --------------------------------------------------------

def build_g_lambda(lam: DvrElement) -> HopfPresentation:
    """Smooth presentation R[T, 1/(1+λT)] with T ↦ X + Y + λXY."""
    dvr = lam.ring
    A = Algebra(dvr, ["T"], horizon=None)
    T = A.gen(0)
    A.add_unit(1 + lam * T)
    T = A.gen(0)
    u_inv = A.unit_inverse(0)
    D, E, S = _make_maps(
        A,
        [lambda AA: AA.gen(0) + AA.gen(1) + lam * AA.gen(0) * AA.gen(1)],
        [([1, 1], dvr.one)],
        [dvr.zero], [([], dvr.one)],
        [-T * u_inv], [([-1], dvr.one)],
    )
    return HopfPresentation("G^(λ)", A, D, E, S, None, {"lam": lam})


def build_g_lambda_1(lam: DvrElement) -> HopfPresentation:
    """R[T]/P_{λ,1}(T), the kernel of the degree-p isogeny on G^(λ)."""
    return build_g_lambda_n(lam, 1)


def build_g_lambda_n(lam: DvrElement, n: int) -> HopfPresentation:
    """R[T]/(((1+λT)^{p^n} - 1)/λ^{p^n}) with T ↦ X + Y + λXY (rank p^n)."""
    check_ramification(lam)
    dvr = lam.ring
    p = dvr.p
    horizon = _horizon(dvr, p**n * _fin(_v(lam)))
    A = Algebra(dvr, ["T"], horizon=horizon)
    A.add_relation(0, poly_from_coeffs(A, p_lambda_coeffs(lam, n), 0))
    T = A.gen(0)
    D, E, S = _make_maps(
        A,
        [lambda AA: AA.gen(0) + AA.gen(1) + lam * AA.gen(0) * AA.gen(1)], [],
        [dvr.zero], [],
        [-T * (1 + lam * T) ** (p**n - 1)], [],
    )
    name = "G_{λ,1}" if n == 1 else f"G_{{λ,{n}}}"
    return HopfPresentation(name, A, D, E, S, p**n, {"lam": lam})


def multiplicative_presentation(dvr: Dvr, p: int) -> HopfPresentation:
    """μ_p as R[T]/(T^p - 1), T ↦ XY."""
    A = Algebra(dvr, ["T"])
    A.add_relation(0, {(p,): dvr.one, (0,): dvr.neg(dvr.one)})
    T = A.gen(0)
    D, E, S = _make_maps(A, [lambda AA: AA.gen(0) * AA.gen(1)], [], [dvr.one], [], [T ** (p - 1)], [])
    return HopfPresentation("μ_p", A, D, E, S, p, {})


def sigma_j(lam: DvrElement, lam2: DvrElement, j: int, h1=None, h2=None) -> AlgebraMap:
    """The algebra map of σ_j: G_{λ,1} → G_{λ',1}, T ↦ ((1+λT)^j - 1)/λ'."""
    h1 = h1 or build_g_lambda_1(lam)
    h2 = h2 or build_g_lambda_1(lam2)
    A = h1.algebra
    T = A.gen(0)
    num = (1 + lam * T) ** j - 1
    img = num.divide(lam2.raw) if not lam2.is_zero() else None
    if img is None:
        raise NotDivisible("λ' = 0")
    return AlgebraMap(h2.algebra, A, [img])


def hom_glb1(lam: DvrElement, lam2: DvrElement):
    """All σ_j that are well-defined Hopf maps G_{λ,1} → G_{λ',1}, as (j, map) pairs."""
    h1, h2 = build_g_lambda_1(lam), build_g_lambda_1(lam2)
    out = []
    for j in range(lam.ring.p):
        try:
            f = sigma_j(lam, lam2, j, h1, h2)
        except NotDivisible:
            continue
        if is_hopf_morphism(f, h2, h1):
            out.append((j, f))
    return out


# -- homomorphisms G_{μ,1} → G_m over R/λ --------------------------------------

def _bivariate_over(q: QuotientRing, mu: DvrElement):
    p = q.p
    P = [q.reduce(q.dvr.elem(c)) for c in p_lambda_coeffs(mu)]
    alg = Algebra(q, ["U", "V"])
    alg.add_relation(0, poly_from_coeffs(alg, P, 0))
    alg.add_relation(1, poly_from_coeffs(alg, P, 1))
    return alg


def is_homomorphism(F, mu: DvrElement, q: QuotientRing, alg: Algebra | None = None) -> bool:
    """F(0) = 1 and F(U)F(V) = F(U+V+μUV) over (R/λ)[U,V]/(P_{μ,1}(U), P_{μ,1}(V))."""
    coeffs = F.coeffs if isinstance(F, TruncatedSeries) else tuple(F)
    if q.n == 0:
        return True
    if coeffs[0] != q.one:
        return False
    alg = alg or _bivariate_over(q, mu)
    U, V = alg.gen(0), alg.gen(1)
    m = alg.const(q.reduce(mu))
    lhs = alg.eval_univariate(coeffs, U) * alg.eval_univariate(coeffs, V)
    rhs = alg.eval_univariate(coeffs, U + V + m * U * V)
    return lhs == rhs


def hom_group_brute(mu: DvrElement, lam: DvrElement, cap: int = 2_000_000):
    """Every F of degree ≤ p-1 over R/λ with F(0) = 1 and the functional equation."""
    dvr = mu.ring
    p = dvr.p
    q = QuotientRing(dvr, _fin(lam.valuation()))
    if q.n == 0:
        return [TruncatedSeries(q, [q.one] + [q.zero] * (p - 1))]
    space = q.size ** (p - 1)
    if space > cap:
        raise SearchSpaceTooLarge(f"{space} candidates exceed the cap {cap}")
    alg = _bivariate_over(q, mu)
    out = []
    for tail in itertools.product(list(q.residues()), repeat=p - 1):
        coeffs = (q.one,) + tail
        if is_homomorphism(coeffs, mu, q, alg):
            out.append(TruncatedSeries(q, coeffs))
    return out


# -- the extensions E^{(μ,λ;F̃)} and their kernels -------------------------------

@dataclass(frozen=True)
class ModelDescriptor:
    """(μ, λ, F̃, j): F̃ holds raw coefficients over R lifting F over R/λ."""

    mu: DvrElement
    lam: DvrElement
    F: tuple
    j: int

    @property
    def ring(self) -> Dvr:
        return self.mu.ring

    @property
    def p(self):
        return self.mu.ring.p

    @property
    def m(self):
        return self.mu.valuation()

    @property
    def n(self):
        return self.lam.valuation()

    def F_over(self, q: QuotientRing):
        return tuple(q.reduce(self.ring.elem(c)) for c in self.F)

    @classmethod
    def from_residue(cls, mu: DvrElement, lam: DvrElement, a, j: int) -> "ModelDescriptor":
        """Descriptor with F = E_p(a, μ; T) in closed form, a a residue mod λ."""
        dvr = mu.ring
        q = QuotientRing(dvr, _fin(lam.valuation()))
        F = ep_closed_form(a, q.reduce(mu), q)
        lift = tuple(q.lift_raw(c) for c in F.coeffs)
        if q.n == 0:
            lift = (dvr.one,) + (dvr.zero,) * (dvr.p - 1)
        return cls(mu, lam, lift, j % dvr.p)

    def describe(self) -> dict:
        return {
            "m": _json_val(self.m),
            "n": _json_val(self.n),
            "mu": list(self.mu.raw),
            "lam": list(self.lam.raw),
            "F": [list(c) for c in self.F],
            "j": self.j,
        }


def _json_val(v):
    return None if v == INF else int(v)


def _model_slack(mu, lam, p, extra=0):
    return p * _fin(_v(mu)) + p * _fin(_v(lam)) + 2 * _fin(_v(lam)) + extra


def build_extension_2dim(mu: DvrElement, lam: DvrElement, F, slack=None) -> HopfPresentation:
    """Smooth two-dimensional E^{(μ,λ;F̃)} with inverted units 1+μT1 and F̃(T1)+λT2.

    ``slack`` is the number of π-adic digits already lost in the inputs
    (default: none, so only the divisions by λ count)."""
    dvr = mu.ring
    p = dvr.p
    F = tuple(F)
    horizon = _horizon(dvr, (slack or 0) + 2 * _fin(_v(lam)))
    A = Algebra(dvr, ["T1", "T2"], horizon=horizon)
    T1, T2 = A.gen(0), A.gen(1)
    A.add_unit(1 + mu * T1)
    A.add_unit(A.eval_univariate(F, T1) + lam * T2)
    T1, T2 = A.gen(0), A.gen(1)
    u1, u2 = A.unit(0), A.unit(1)

    def delta1(AA):
        X1, Y1 = AA.gen(0), AA.gen(2)
        return X1 + Y1 + mu * X1 * Y1

    def delta2(AA):
        X1, X2, Y1, Y2 = AA.gen(0), AA.gen(1), AA.gen(2), AA.gen(3)
        num = (AA.eval_univariate(F, X1) + lam * X2) * (AA.eval_univariate(F, Y1) + lam * Y2) \
            - AA.eval_univariate(F, X1 + Y1 + mu * X1 * Y1)
        return num.divide(lam.raw)

    eps2 = dvr.div(dvr.sub(dvr.one, F[0]), lam.raw)
    d = len(F) - 1
    # S(T2) = (u1^d - u2 N(T1)) / (λ u2 u1^d) with N = sum f_k (-T1)^k u1^{d-k}
    N = A.zero()
    for k, f in enumerate(F):
        N = N + A.const(f) * (-T1) ** k * u1 ** (d - k)
    s2_num = (u1**d - u2 * N).divide(lam.raw)
    den = [0, 0]
    den[0], den[1] = d, 1
    s2 = Elem(A, s2_num.num, tuple(den))
    D, E, S = _make_maps(
        A,
        [delta1, delta2],
        [([1, 0, 1, 0], dvr.one), ([0, 1, 0, 1], dvr.one)],
        [dvr.zero, eps2], [([], dvr.one), ([], dvr.one)],
        [-T1 * A.unit_inverse(0), s2], [([-1, 0], dvr.one), ([0, -1], dvr.one)],
    )
    return HopfPresentation("E^(μ,λ;F)", A, D, E, S, None, {"mu": mu, "lam": lam, "F": F})


def build_model(d: ModelDescriptor) -> HopfPresentation:
    """The finite flat kernel E^{(μ,λ;F̃,j)} of rank p².

    Relations: P_{μ,1}(T1) and ((F̃(T1)+λT2)^p - (1+μT1)^j)/λ^p, the second
    being (1+μT1)^j times the usual one, which makes it monic in T2.
    """
    mu, lam, F, j = d.mu, d.lam, tuple(d.F), d.j % d.p
    check_ramification(mu)
    check_ramification(lam)
    dvr = mu.ring
    p = dvr.p
    horizon = _horizon(dvr, _model_slack(mu, lam, p))
    A0 = Algebra(dvr, ["T1", "T2"], horizon=horizon)
    A0.add_relation(0, poly_from_coeffs(A0, p_lambda_coeffs(mu), 0))
    T1, T2 = A0.gen(0), A0.gen(1)
    u1 = 1 + mu * T1
    u2 = A0.eval_univariate(F, T1) + lam * T2
    lam_p = (lam**p).raw
    if lam.is_zero():
        raise NotDivisible("λ = 0 has no finite model")
    try:
        rel2 = (u2**p - u1**j).divide(lam_p)
    except NotDivisible as exc:
        raise ConditionCViolated("F^p (1+μT)^{-j} is not 1 modulo (λ^p, P_{μ,1})") from exc
    lead = (0, p)
    if (dvr.val(dvr.sub(rel2.num.get(lead, dvr.zero), dvr.one)) < horizon):
        raise ConditionCViolated("second relation is not monic")
    num2 = dict(rel2.num)
    num2[lead] = dvr.one
    A = Algebra(dvr, ["T1", "T2"], horizon=horizon)
    A.add_relation(0, A0.relations[0])
    A.add_relation(1, num2)
    T1, T2 = A.gen(0), A.gen(1)
    u1 = 1 + mu * T1
    u2 = A.eval_univariate(F, T1) + lam * T2

    def delta1(AA):
        X1, Y1 = AA.gen(0), AA.gen(2)
        return X1 + Y1 + mu * X1 * Y1

    def delta2(AA):
        X1, X2, Y1, Y2 = AA.gen(0), AA.gen(1), AA.gen(2), AA.gen(3)
        num = (AA.eval_univariate(F, X1) + lam * X2) * (AA.eval_univariate(F, Y1) + lam * Y2) \
            - AA.eval_univariate(F, X1 + Y1 + mu * X1 * Y1)
        return num.divide(lam.raw)

    eps2 = dvr.div(dvr.sub(dvr.one, F[0]), lam.raw)
    s1 = -T1 * u1 ** (p - 1)
    s2 = (u2 ** (p - 1) * u1 ** (p - j) - A.eval_univariate(F, s1)).divide(lam.raw)
    D, E, S = _make_maps(A, [delta1, delta2], [], [dvr.zero, eps2], [], [s1, s2], [])
    return HopfPresentation("E^(μ,λ;F,j)", A, D, E, S, p * p, {"descriptor": d})


def generic_fiber_check(h: HopfPresentation) -> bool:
    """μ^p·P1 = (1+μT1)^p - 1 and λ^p·P2 ≡ u2^p - u1^j modulo P1, so inverting
    μ and λ turns the model into T1'^p = 1, T2'^p = T1'^j."""
    d = h.meta["descriptor"]
    A = h.algebra
    dvr = A.ring
    p = dvr.p
    free = Algebra(dvr, ["T1", "T2"], horizon=A.horizon)
    T1, T2 = free.gen(0), free.gen(1)
    u1 = 1 + d.mu * T1
    u2 = free.eval_univariate(d.F, T1) + d.lam * T2
    rel1 = Elem(free, dict(A.relations[0]), ())
    rel2 = Elem(free, dict(A.relations[1]), ())
    if not rel1 * d.mu**p == u1**p - 1:
        return False
    red = Algebra(dvr, ["T1", "T2"], horizon=A.horizon)
    red.add_relation(0, rel1.num)
    diff = rel2 * d.lam**p - (u2**p - u1**d.j)
    return Elem(red, red.reduce(diff.num), ()).is_zero()


def ex39_maps(lam: DvrElement):
    """The mutually inverse maps between E^{(λ^p,λ;1,1)} and G_{λ,2}.

    Returns (model, g2, to_g2, to_model) where to_g2 is the algebra map of
    the model's coordinate ring into that of G_{λ,2} (T1 ↦ ((1+λT)^p-1)/λ^p,
    T2 ↦ T) and to_model the inverse (T ↦ T2).
    """
    dvr = lam.ring
    p = dvr.p
    one = (dvr.one,)
    model = build_model(ModelDescriptor(lam**p, lam, one, 1))
    g2 = build_g_lambda_n(lam, 2)
    B = g2.algebra
    T = B.gen(0)
    img1 = ((1 + lam * T) ** p - 1).divide((lam**p).raw)
    to_g2 = AlgebraMap(model.algebra, B, [img1, T])
    to_model = AlgebraMap(B, model.algebra, [model.algebra.gen(1)])
    return model, g2, to_g2, to_model


def check_ex39(lam: DvrElement) -> dict:
    model, g2, f, g = ex39_maps(lam)
    A, B = model.algebra, g2.algebra
    return {
        "model_hopf": verify_hopf(model).ok,
        "g2_hopf": verify_hopf(g2).ok,
        "to_g2_morphism": is_hopf_morphism(f, model, g2),
        "to_model_morphism": is_hopf_morphism(g, g2, model),
        "round_trip_model": all(g(f(x)) == x for x in A.gens()),
        "round_trip_g2": all(f(g(x)) == x for x in B.gens()),
    }


# -- morphisms between models ------------------------------------------------------

def psi_rs(d1: ModelDescriptor, d2: ModelDescriptor, r: int, s: int, h1=None, h2=None) -> AlgebraMap:
    """Algebra map of ψ_{r,s}: E1 → E2 on coordinate rings (A2 → A1):
    T1 ↦ ((1+μ1T1)^r - 1)/μ2,  T2 ↦ (u2^r u1^s - F̃2(image of T1))/λ2.
    Raises NotDivisible when the divisions fail."""
    h1 = h1 or build_model(d1)
    h2 = h2 or build_model(d2)
    A1 = h1.algebra
    T1, T2 = A1.gen(0), A1.gen(1)
    u1 = 1 + d1.mu * T1
    u2 = A1.eval_univariate(d1.F, T1) + d1.lam * T2
    img1 = (u1**r - 1).divide(d2.mu.raw)
    img2 = (u2**r * u1**s - A1.eval_univariate(d2.F, img1)).divide(d2.lam.raw)
    return AlgebraMap(h2.algebra, A1, [img1, img2])


def model_morphisms(d1: ModelDescriptor, d2: ModelDescriptor, h1=None, h2=None):
    """All (r, s) ∈ [0,p)² for which ψ_{r,s} is a well-defined Hopf morphism."""
    h1 = h1 or build_model(d1)
    h2 = h2 or build_model(d2)
    out = []
    for r in range(d1.p):
        for s in range(d1.p):
            try:
                f = psi_rs(d1, d2, r, s, h1, h2)
            except NotDivisible:
                continue
            if is_hopf_morphism(f, h2, h1):
                out.append((r, s))
    return out


# -- the isogeny whose kernel is the model ------------------------------------------

def _poly_mul(R, a, b, deg=None):
    out = [R.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if R.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = R.add(out[i + j], R.mul(x, y))
    return out if deg is None else (out + [R.zero] * (deg + 1))[: deg + 1]


def _poly_pow(R, a, k):
    out = [R.one]
    for _ in range(k):
        out = _poly_mul(R, out, a)
    return out


def find_cokernel_series(d: ModelDescriptor, cap: int = 2_000_000):
    """G over R/λ^p of degree ≤ p-1 with F̃^p = (1+μT)^j G(P_{μ,1}(T)) in (R/λ^p)[T].

    Coefficients are solved from the bottom degree up; a coefficient is
    determined directly whenever the linear coefficient of P_{μ,1} is a unit
    and enumerated otherwise.
    """
    dvr, p = d.ring, d.p
    qp = QuotientRing(dvr, min(p * _fin(d.n), dvr.cap - 1))
    R = qp
    if qp.n == 0:
        return [R.one] + [R.zero] * (p - 1)
    P = [qp.reduce(dvr.elem(c)) for c in p_lambda_coeffs(d.mu)]
    F = [qp.reduce(dvr.elem(c)) for c in d.F]
    target = _poly_pow(R, F, p)
    u = [R.one, qp.reduce(d.mu)]
    uj = _poly_pow(R, u, d.j % p)
    P_pows = [[R.one]]
    for _ in range(p - 1):
        P_pows.append(_poly_mul(R, P_pows[-1], P))
    top = max(len(target), len(uj) + len(P_pows[-1]) - 1)

    def value(gs):
        acc = [R.zero] * top
        for k, g in enumerate(gs):
            term = _poly_mul(R, uj, [R.mul(g, c) for c in P_pows[k]])
            for i, c in enumerate(term):
                acc[i] = R.add(acc[i], c)
        return acc

    tgt = (target + [R.zero] * top)[:top]
    c1 = P[1]
    unit_lead = qp.valuation(c1) == 0
    budget = [cap]

    def search(gs):
        k = len(gs)
        if k == p:
            return list(gs) if value(gs) == tgt else None
        if unit_lead:
            partial = value(gs + [R.zero])
            ck = R.pow(c1, k)
            g = R.mul(R.sub(tgt[k], partial[k]), R.inv(ck))
            cands = [g]
        else:
            cands = qp.residues()
        for g in cands:
            budget[0] -= 1
            if budget[0] < 0:
                raise SearchSpaceTooLarge("cokernel series search exceeded its cap")
            cand = gs + [g]
            if value(cand)[k] != tgt[k]:
                continue
            res = search(cand)
            if res is not None:
                return res
        return None

    res = search([R.pow(F[0], p)])
    if res is None:
        raise NoCokernelSeries("no G with F^p = (1+μT)^j G(P_{μ,1}) exists")
    return res


def promote_descriptor(d: ModelDescriptor, precision: int) -> ModelDescriptor:
    src = d.ring
    dst = Dvr.of(src.spec.with_precision(precision))
    return ModelDescriptor(dst.elem(src.promote(d.mu.raw, dst)), dst.elem(src.promote(d.lam.raw, dst)),
                           tuple(src.promote(c, dst) for c in d.F), d.j)


def _kernel_is_model(d: ModelDescriptor, Gt) -> bool:
    """Both coordinates of the isogeny vanish on the model."""
    p, j = d.p, d.j % d.p
    B = build_model(d).algebra
    T1, T2 = B.gen(0), B.gen(1)
    u1 = 1 + d.mu * T1
    u2 = B.eval_univariate(d.F, T1) + d.lam * T2
    P = B.eval_univariate(p_lambda_coeffs(d.mu), T1)
    num = u2**p * u1 ** (p - j) - B.eval_univariate(Gt, P) * u1**p
    return P.is_zero() and num.is_zero()


def isogeny_psi_j(d: ModelDescriptor):
    """The isogeny E^{(μ,λ;F̃)} → E^{(μ^p,λ^p;G̃)} whose kernel is the model.

    Works in a copy of the ring with enough precision for the extra
    division by λ^p.  Returns a dict with G (residues mod λ^p), the lifted
    G̃, both smooth presentations, the algebra map and verification flags.
    """
    p = d.p
    slack = _model_slack(d.mu, d.lam, p, extra=p * _fin(d.n))
    dvr = d.ring
    need = 2 * (2 * slack + 2 * dvr.e)
    if dvr.cap < need:
        d = promote_descriptor(d, -(-need // dvr.e))
        dvr = d.ring
    G = find_cokernel_series(d)
    qp = QuotientRing(dvr, p * _fin(d.n))
    Gt = tuple(qp.lift_raw(c) for c in G) if qp.n else (dvr.one,)
    mu, lam = d.mu, d.lam
    src = build_extension_2dim(mu, lam, d.F, slack=slack)
    dst = build_extension_2dim(mu**p, lam**p, Gt, slack=slack)
    A = src.algebra
    T1, T2 = A.gen(0), A.gen(1)
    u1, u2 = A.unit(0), A.unit(1)
    P = A.eval_univariate(p_lambda_coeffs(mu), T1)
    j = d.j % p
    num = u2**p * u1 ** (p - j) - A.eval_univariate(Gt, P) * u1**p
    img2 = Elem(A, num.divide((lam**p).raw).num, (p, 0))
    f = AlgebraMap(dst.algebra, A, [P, img2], [([p, 0], dvr.one), ([-j, p], dvr.one)])
    flags = {
        "units": not f.check_units(),
        "morphism": is_hopf_morphism(f, dst, src),
        "source_hopf": verify_hopf(src).ok,
        "target_hopf": verify_hopf(dst).ok,
        "kernel_is_model": _kernel_is_model(d, Gt),
    }
    return {"G": G, "G_lift": Gt, "source": src, "target": dst, "map": f, "checks": flags}


# -- serialisation ---------------------------------------------------------------------

def _poly_json(poly):
    return [[list(m), list(c) if isinstance(c, tuple) else c] for m, c in sorted(poly.items())]


def _elem_json(x: Elem):
    return {"num": _poly_json(x.num), "den": list(x.den)}


def presentation_to_json(h: HopfPresentation) -> dict:
    A = h.algebra
    gens = A.gens()
    out = {
        "name": h.name,
        "ring": A.ring.spec.describe(),
        "generators": list(A.names),
        "relations": {A.names[i]: _poly_json(rel) for i, rel in sorted(A.relations.items())},
        "units": [_poly_json(u) for u in A.units],
        "comultiplication": {A.names[i]: _elem_json(h.comult(g)) for i, g in enumerate(gens)},
        "counit": {A.names[i]: _elem_json(h.counit(g)) for i, g in enumerate(gens)},
        "antipode": {A.names[i]: _elem_json(h.antipode(g)) for i, g in enumerate(gens)},
        "rank": h.rank,
        "precision_horizon": A.horizon,
    }
    if "descriptor" in h.meta:
        out["descriptor"] = h.meta["descriptor"].describe()
    return out
