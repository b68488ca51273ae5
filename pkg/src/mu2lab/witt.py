"""p-typical Witt vectors of finite length over a coefficient ring.

Structure polynomials are built once per (p, n) over Z with sympy and
evaluated in whatever ring the vector lives in (a :class:`Dvr`, a
:class:`QuotientRing`, or anything with the same raw-method protocol).
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass

from sympy import ZZ
from sympy.polys.rings import ring as sympy_ring

from .dvr import Dvr, DvrElement, DvrSpec, QuotientRing
from .errors import (
    CaseNotApplicable,
    InsufficientWindow,
    NonIntegralCoefficient,
    SpecMismatch,
    WindowMismatch,
    WrongPrime,
)


def _exact_quo(poly, d):
    q = poly.quo_ground(d)
    if q * d != poly:
        raise NonIntegralCoefficient(f"structure polynomial not divisible by {d}")
    return q


def _terms(poly, nvars):
    """Flatten a sympy polynomial into (int coeff, ((var, exp), ...)) pairs."""
    out = []
    for mono, c in poly.terms():
        out.append((int(c), tuple((i, e) for i, e in enumerate(mono[:nvars]) if e)))
    return out


class StructurePolynomials:
    """Integral polynomials for sum, product, negation, Frobenius and
    (p = 2) the twisted Verschiebung, up to window length n.

    Variables are X_0..X_n and Y_0..Y_n (one extra index so Frobenius
    components F_r, which need X_{r+1}, exist for every r < n).
    """

    def __init__(self, p: int, n: int):
        if n < 1:
            raise ValueError("window must be at least 1")
        self.p, self.n = p, n
        names = [f"X{i}" for i in range(n + 1)] + [f"Y{i}" for i in range(n + 1)]
        self.zring, *gens = sympy_ring(",".join(names), ZZ)
        self.X, self.Y = gens[: n + 1], gens[n + 1:]
        X, Y, zero = self.X, self.Y, self.zring.zero

        self.sum, self.prod, self.neg, self.frob = [], [], [], []
        for r in range(n):
            self.sum.append(self._solve(self.sum, r, self.ghost(X, r) + self.ghost(Y, r)))
            self.prod.append(self._solve(self.prod, r, self.ghost(X, r) * self.ghost(Y, r)))
            self.neg.append(self._solve(self.neg, r, -self.ghost(X, r)))
            self.frob.append(self._solve(self.frob, r, self.ghost(X, r + 1)))
        self.vtilde = []
        if p == 2:
            self.vtilde.append(zero)
            for r in range(1, n + 1):
                target = 2 ** (2**r) * self.ghost(X, r - 1)
                self.vtilde.append(self._solve(self.vtilde, r, target))
        width = 2 * (n + 1)
        self._sum_t = [_terms(f, width) for f in self.sum]
        self._prod_t = [_terms(f, width) for f in self.prod]
        self._neg_t = [_terms(f, width) for f in self.neg]
        self._frob_t = [_terms(f, width) for f in self.frob]
        self._vt_t = [_terms(f, width) for f in self.vtilde]

    def ghost(self, vs, r):
        p = self.p
        return sum((p**i * vs[i] ** (p ** (r - i)) for i in range(r + 1)), self.zring.zero)

    def _solve(self, prev, r, target):
        p = self.p
        rest = target - sum((p**i * prev[i] ** (p ** (r - i)) for i in range(r)), self.zring.zero)
        return _exact_quo(rest, p**r)

    def check_ghost_identities(self) -> bool:
        """Verify every defining identity symbolically."""
        X, Y, p = self.X, self.Y, self.p
        for r in range(self.n):
            if self.ghost(self.sum, r) != self.ghost(X, r) + self.ghost(Y, r):
                return False
            if self.ghost(self.prod, r) != self.ghost(X, r) * self.ghost(Y, r):
                return False
            if self.ghost(self.neg, r) != -self.ghost(X, r):
                return False
            if self.ghost(self.frob, r) != self.ghost(X, r + 1):
                return False
        if p == 2:
            for r in range(1, self.n + 1):
                if self.ghost(self.vtilde, r) != 2 ** (2**r) * self.ghost(X, r - 1):
                    return False
        return True


@functools.lru_cache(maxsize=None)
def structure_polynomials(p: int, n: int) -> StructurePolynomials:
    return StructurePolynomials(p, n)


def build_structure_polynomials(p: int, n: int) -> StructurePolynomials:
    return structure_polynomials(p, n)


def _evaluate(ring, terms, xs, ys, cache):
    """Evaluate flattened integer polynomials at (xs, ys) in ``ring``."""
    values = list(xs) + list(ys)
    acc = ring.zero
    for c, mono in terms:
        term = ring.from_int(c)
        if ring.is_zero(term):
            continue
        for i, e in mono:
            key = (i, e)
            pw = cache.get(key)
            if pw is None:
                pw = cache[key] = ring.pow(values[i], e)
            term = ring.mul(term, pw)
            if ring.is_zero(term):
                break
        acc = ring.add(acc, term)
    return acc


class WittVector:
    """An element of W_n(A): entries a_0..a_{n-1} of the coefficient ring A."""

    __slots__ = ("ring", "entries", "p")

    def __init__(self, ring, entries, p: int | None = None):
        self.ring = ring
        self.entries = tuple(entries)
        self.p = p if p is not None else ring.p

    @classmethod
    def zero(cls, ring, n):
        return cls(ring, [ring.zero] * n)

    @property
    def n(self):
        return len(self.entries)

    def _check(self, other):
        if not isinstance(other, WittVector):
            raise SpecMismatch("not a Witt vector")
        if other.ring != self.ring and other.ring is not self.ring:
            raise SpecMismatch("Witt vectors over different rings")
        if other.n != self.n:
            raise WindowMismatch(f"windows {self.n} and {other.n}")

    def __add__(self, other):
        return witt_add(self, other)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def __neg__(self):
        return witt_neg(self)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, WittVector) and self.entries == other.entries and (
            other.ring is self.ring or other.ring == self.ring)

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"WittVector{self.entries}"

    def is_zero(self):
        return all(self.ring.is_zero(x) for x in self.entries)

    def padded(self, n):
        if n < self.n:
            if any(not self.ring.is_zero(x) for x in self.entries[n:]):
                raise WindowMismatch("truncation would drop nonzero entries")
            return WittVector(self.ring, self.entries[:n], self.p)
        return WittVector(self.ring, self.entries + (self.ring.zero,) * (n - self.n), self.p)

    def truncated(self, n):
        return WittVector(self.ring, self.entries[:n], self.p)

    def support(self):
        return [i for i, x in enumerate(self.entries) if not self.ring.is_zero(x)]

    def is_finite_support_nilpotent(self):
        nil = getattr(self.ring, "is_nilpotent", None)
        return nil is None or all(nil(x) for x in self.entries)


def _binary(a, b, which):
    a._check(b)
    R, n = a.ring, a.n
    sp = structure_polynomials(a.p, n)
    terms = getattr(sp, which)
    xs = a.entries + (R.zero,)
    ys = b.entries + (R.zero,)
    cache = {}
    return WittVector(R, [_evaluate(R, terms[r], xs, ys, cache) for r in range(n)], a.p)


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    return _binary(a, b, "_sum_t")


def witt_mul(a: WittVector, b: WittVector) -> WittVector:
    return _binary(a, b, "_prod_t")


def witt_neg(a: WittVector) -> WittVector:
    R, n = a.ring, a.n
    if a.p != 2:
        return WittVector(R, [R.neg(x) for x in a.entries], a.p)
    sp = structure_polynomials(a.p, n)
    zeros = (R.zero,) * (n + 1)
    cache = {}
    return WittVector(R, [_evaluate(R, sp._neg_t[r], a.entries + (R.zero,), zeros, cache)
                          for r in range(n)], a.p)


def witt_scalar(a: WittVector, m: int) -> WittVector:
    """m·a by repeated addition (m ≥ 0)."""
    acc = WittVector.zero(a.ring, a.n)
    for _ in range(m):
        acc = witt_add(acc, a)
    return acc


def _p_is_zero(ring) -> bool:
    flag = getattr(ring, "p_is_zero", None)
    if flag is not None:
        return flag
    return ring.is_zero(ring.from_int(ring.p))


def frobenius(a: WittVector, length: int | None = None) -> WittVector:
    """F on W_n, entries beyond the window taken to be zero.

    ``length`` keeps only the first entries of the result; F_r needs
    a_0..a_{r+1}, so F(V(a)) to length n never builds window n+1 polynomials.
    """
    R, p = a.ring, a.p
    n = a.n if length is None else min(length, a.n)
    if _p_is_zero(R):
        return WittVector(R, [R.pow(x, p) for x in a.entries[:n]], p)
    sp = structure_polynomials(p, n)
    xs = (a.entries + (R.zero,))[: n + 1]
    zeros = (R.zero,) * (n + 1)
    cache = {}
    return WittVector(R, [_evaluate(R, sp._frob_t[r], xs, zeros, cache) for r in range(n)], p)


def verschiebung(a: WittVector, extend: bool = True) -> WittVector:
    """V(a) = (0, a_0, a_1, ...); the window grows by one unless extend=False."""
    entries = (a.ring.zero,) + a.entries
    return WittVector(a.ring, entries if extend else entries[: a.n], a.p)


def tilde_verschiebung(a: WittVector, extend: bool = True) -> WittVector:
    """The p = 2 twisted Verschiebung, defined by Φ_r(Ṽa) = 2^{2^r} Φ_{r-1}(a)."""
    if a.p != 2:
        raise WrongPrime("the twisted Verschiebung exists only for p = 2")
    R, n = a.ring, a.n
    m = n + 1 if extend else n
    sp = structure_polynomials(2, m)
    xs = a.entries + (R.zero,) * (m + 1 - n)
    zeros = (R.zero,) * (m + 1)
    cache = {}
    return WittVector(R, [_evaluate(R, sp._vt_t[r], xs, zeros, cache) for r in range(m)], 2)


def teichmuller(ring, x, n: int) -> WittVector:
    if isinstance(x, DvrElement):
        x = ring.reduce(x) if hasattr(ring, "reduce") else x.raw
    return WittVector(ring, [x] + [ring.zero] * (n - 1))


def teich_mul(c, a: WittVector) -> WittVector:
    """[c]·a = (c a_0, c^p a_1, c^{p^2} a_2, ...)."""
    R, p = a.ring, a.p
    return WittVector(R, [R.mul(R.pow(c, p**i), x) for i, x in enumerate(a.entries)], p)


# -- ghost components over the integers (independent oracle) --------------

def ghost_components(entries, p):
    return [sum(p**i * entries[i] ** (p ** (r - i)) for i in range(r + 1)) for r in range(len(entries))]


def from_ghost(ghosts, p):
    out = []
    for r, w in enumerate(ghosts):
        rest = w - sum(p**i * out[i] ** (p ** (r - i)) for i in range(r))
        if rest % p**r:
            raise NonIntegralCoefficient("ghost vector is not integral")
        out.append(rest // p**r)
    return out


def ghost_oracle(op, a, b, p, modulus):
    """Witt sum or product of integer vectors via ghost components, reduced mod ``modulus``."""
    ga, gb = ghost_components(a, p), ghost_components(b, p)
    if op == "add":
        g = [x + y for x, y in zip(ga, gb)]
    elif op == "mul":
        g = [x * y for x, y in zip(ga, gb)]
    else:
        raise ValueError(op)
    return [c % modulus for c in from_ghost(g, p)]


def integers_mod(p: int, k: int) -> Dvr:
    """Z/p^k packaged as a coefficient ring (an unramified truncated d.v.r.)."""
    return Dvr.of(DvrSpec.mixed_char(p, (-p, 1), precision=max(k, 2)) if k >= 2
                  else DvrSpec.equal_char(p, precision=1))


# -- kernels and the maps used by the classification -----------------------

def _extra_window(p, v):
    extra = 0
    while p**extra < v + 1:
        extra += 1
    return extra + 1


def _satisfies_kernel(a: WittVector, c, check_window):
    ext = a.padded(check_window)
    return frobenius(ext) == teich_mul(c, ext)


def kernel_F_minus_teich(q: QuotientRing, mu: DvrElement, n: int, strict: bool = False):
    """All a in Ŵ(R/λ) supported in the first n entries with F(a) = [μ^{p-1}]a.

    The defining equations are checked on a window long enough that every
    component beyond it vanishes for nilpotent entries.  The kernel of F on
    Ŵ is infinite once λ is not a unit, so a window is always a truncation;
    with strict=True an InsufficientWindow is raised when window n+1 holds
    elements not already found in window n.
    """
    p = q.p
    if q.n == 0:
        return [WittVector(q, [q.zero] * n)]
    c = q.pow(q.reduce(mu), p - 1)
    check = n + _extra_window(p, q.n)
    if _p_is_zero(q):
        per = []
        for i in range(n):
            ci = q.pow(c, p**i)
            per.append([x for x in q.nilpotents() if q.pow(x, p) == q.mul(ci, x)])
        found = [WittVector(q, list(t)) for t in itertools.product(*per)]
    else:
        found = [WittVector(q, list(t)) for t in itertools.product(list(q.nilpotents()), repeat=n)
                 if _satisfies_kernel(WittVector(q, list(t)), c, check)]
    if strict:
        bigger = kernel_F_minus_teich(q, mu, n + 1, strict=False)
        if len(bigger) > len(found):
            raise InsufficientWindow(f"kernel has elements supported beyond window {n}")
    return found


def kernel_F(q: QuotientRing, n: int, strict: bool = False):
    return kernel_F_minus_teich(q, q.dvr.elem(q.dvr.zero), n, strict)


def termwise_sum_check(a: WittVector, b: WittVector, lam: DvrElement | None = None) -> bool:
    """Whether the Witt sum equals the componentwise sum (compared one entry past the window)."""
    R = a.ring
    m = a.n + 1
    s = witt_add(a.padded(m), b.padded(m))
    naive = WittVector(R, [R.add(x, y) for x, y in zip(a.padded(m).entries, b.padded(m).entries)], a.p)
    return s == naive


def lift_vector(a: WittVector, target: QuotientRing, offsets=None) -> WittVector:
    """Lift a vector over R/λ to R/λ' (λ | λ'), optionally adding λ·offsets."""
    src = a.ring
    out = []
    for i, x in enumerate(a.entries):
        y = src.lift(x)
        if offsets is not None:
            y = y + src.dvr.elem(src.dvr.pi_power(src.n)) * offsets[i]
        out.append(target.reduce(y))
    return WittVector(target, out, a.p)


def pushforward_p(a: WittVector, lam: DvrElement, window: int | None = None, offsets=None) -> WittVector:
    """p·ã in Ŵ(R/λ^p) for a lift ã of a ∈ Ŵ(R/λ)."""
    src = a.ring
    p = src.p
    target = QuotientRing(src.dvr, p * src.n)
    m = window or a.n + 1
    lifted = lift_vector(a, target, offsets).padded(m)
    return witt_scalar(lifted, p)


def psi_pullback(a: WittVector, mu: DvrElement) -> WittVector:
    """The pullback map on Ŵ(R/λ) used to compare the two isogenies.

    mixed p > 2 (needs p^2 ≡ 0 mod λ): [p/μ^{p-1}]a + V(a);
    mixed p = 2:                       [2/μ]a + V(a) + Ṽ(a);
    equal characteristic:              V(a).
    """
    q = a.ring
    dvr = q.dvr
    p = q.p
    V = verschiebung(a)
    if not dvr.mixed:
        return V
    if p > 2 and q.n > 2 * dvr.e:
        raise CaseNotApplicable("needs p^2 ≡ 0 modulo λ")
    mu_pow = mu ** (p - 1)
    if mu_pow.valuation() > dvr.e:
        raise CaseNotApplicable("p/μ^{p-1} is not integral")
    c = q.reduce(dvr.p_element() / mu_pow)
    out = witt_add(teich_mul(c, a.padded(a.n + 1)), V)
    if p == 2:
        out = witt_add(out, tilde_verschiebung(a))
    return out


def random_vector(ring, n, rng: random.Random, nilpotent=False) -> WittVector:
    if hasattr(ring, "residues"):
        pool = list(ring.nilpotents() if nilpotent else ring.residues())
        return WittVector(ring, [rng.choice(pool) for _ in range(n)])
    return WittVector(ring, [ring.from_int(rng.randrange(ring.modulus)) for _ in range(n)])
