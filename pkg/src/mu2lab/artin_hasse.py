"""The Artin-Hasse exponential and its two-parameter deformation E_p(U, Λ; T).

Universal coefficients are computed exactly over Q[U, Λ] and checked to
be p-integral before being specialised to a ring.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from sympy import QQ
from sympy.polys.rings import ring as sympy_ring

from .errors import NonIntegralCoefficient
from .witt import WittVector


class TruncatedSeries:
    """c_0 + c_1 T + ... + c_D T^D over a coefficient ring (raw coefficients)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs, degree: int | None = None):
        coeffs = list(coeffs)
        if degree is not None:
            coeffs = (coeffs + [ring.zero] * (degree + 1))[: degree + 1]
        self.ring = ring
        self.coeffs = tuple(coeffs)

    @property
    def degree_bound(self):
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else self.ring.zero

    def __mul__(self, other):
        R, D = self.ring, self.degree_bound
        out = [R.zero] * (D + 1)
        for i, x in enumerate(self.coeffs):
            if R.is_zero(x):
                continue
            for j, y in enumerate(other.coeffs[: D + 1 - i]):
                if not R.is_zero(y):
                    out[i + j] = R.add(out[i + j], R.mul(x, y))
        return TruncatedSeries(R, out)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self[k] == other[k] for k in range(n))

    __hash__ = None

    def __repr__(self):
        terms = [f"{c}·T^{k}" for k, c in enumerate(self.coeffs) if not self.ring.is_zero(c)]
        return "TruncatedSeries(" + (" + ".join(terms) or "0") + ")"

    def substitute_power(self, k, degree=None):
        """F(T^k), truncated at ``degree`` (default: the same bound)."""
        R = self.ring
        D = self.degree_bound if degree is None else degree
        out = [R.zero] * (D + 1)
        for i, c in enumerate(self.coeffs):
            if i * k <= D:
                out[i * k] = c
        return TruncatedSeries(R, out)

    def map(self, f, ring):
        return TruncatedSeries(ring, [f(c) for c in self.coeffs])

    def trimmed(self):
        coeffs = list(self.coeffs)
        while len(coeffs) > 1 and self.ring.is_zero(coeffs[-1]):
            coeffs.pop()
        return coeffs

    def is_polynomial_below(self, d):
        return all(self.ring.is_zero(c) for c in self.coeffs[d:])

    def reduce_monic(self, relation):
        """Remainder modulo a monic polynomial (raw coefficient list, constant first)."""
        R = self.ring
        d = len(relation) - 1
        coeffs = list(self.coeffs)
        for k in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[k]
            if R.is_zero(c):
                continue
            for i in range(d):
                coeffs[k - d + i] = R.sub(coeffs[k - d + i], R.mul(c, relation[i]))
            coeffs[k] = R.zero
        return TruncatedSeries(R, coeffs[:d] + [R.zero] * max(0, d - len(coeffs)))


def _check_integral(x: Fraction, p: int):
    if x.denominator % p == 0:
        raise NonIntegralCoefficient(f"coefficient {x} is not p-integral")
    return x


@functools.lru_cache(maxsize=None)
def artin_hasse_rational(p: int, D: int):
    """Exact rational coefficients of E_p(T) = exp(sum_r T^{p^r}/p^r) up to T^D."""
    g = [Fraction(0)] * (D + 1)
    k = 1
    while k <= D:
        g[k] = Fraction(1, k)
        k *= p
    f = [Fraction(1)] + [Fraction(0)] * D
    for n in range(1, D + 1):
        acc = Fraction(0)
        for k in range(1, n + 1):
            if g[k]:
                acc += k * g[k] * f[n - k]
        f[n] = acc / n
    return tuple(_check_integral(x, p) for x in f)


def artin_hasse(p: int, D: int, ring=None) -> TruncatedSeries:
    """E_p(T) up to degree D, over ``ring`` (default Z/p^8)."""
    if ring is None:
        from .witt import integers_mod
        ring = integers_mod(p, 8)
    return TruncatedSeries(ring, [ring.from_fraction(x) for x in artin_hasse_rational(p, D)])


@functools.lru_cache(maxsize=None)
def _universal_ring():
    return sympy_ring("U,L", QQ)


def _assert_p_integral(poly, p):
    for _, c in poly.terms():
        if QQ.to_sympy(c).q % p == 0:
            raise NonIntegralCoefficient(f"coefficient {c} is not p-integral")


def _exp_poly(g, D, R):
    f = [R.one] + [R.zero] * D
    for n in range(1, D + 1):
        acc = R.zero
        for k in range(1, n + 1):
            if g[k]:
                acc += k * g[k] * f[n - k]
        f[n] = acc * QQ(1, n)
    return f


@functools.lru_cache(maxsize=None)
def universal_ep(p: int, D: int):
    """Coefficients (in Q[U, Λ], asserted p-integral) of E_p(U, Λ; T) up to T^D.

    Built from the logarithm of the product formula:
    p odd: sum over (i, p) = 1 of (-1)^{i-1}/i · L(UΛ^{i-1}T^i);
    p = 2: sum over odd i of 1/i · [L(UΛ^{i-1}T^i) - L(UΛ^{2i-1}T^{2i})];
    where L(X) = sum_r X^{p^r}/p^r is the Artin-Hasse logarithm.
    """
    R, U, L = _universal_ring()
    g = [R.zero] * (D + 1)

    def add_log(coef, upow, lpow, tpow):
        # coef · sum_r (U^upow Λ^lpow T^tpow)^{p^r} / p^r
        r = 0
        while tpow * p**r <= D:
            pr = p**r
            g[tpow * pr] += coef * QQ(1, pr) * U ** (upow * pr) * L ** (lpow * pr)
            r += 1

    for i in range(1, D + 1):
        if i % p == 0:
            continue
        if p > 2:
            add_log(QQ((-1) ** (i - 1), i), 1, i - 1, i)
        else:
            add_log(QQ(1, i), 1, i - 1, i)
            if 2 * i <= D:
                add_log(QQ(-1, i), 1, 2 * i - 1, 2 * i)
    f = _exp_poly(g, D, R)
    for c in f:
        _assert_p_integral(c, p)
    return tuple(f)


@functools.lru_cache(maxsize=None)
def universal_ep_from_definition(p: int, D: int):
    """Same series from (1+ΛT)^{U/Λ} prod_{r≥1} (1+Λ^{p^r}T^{p^r})^{((U/Λ)^{p^r} - (U/Λ)^{p^{r-1}})/p^r}.

    Every Λ power that appears is nonnegative, so this is an independent
    computation in Q[U, Λ].
    """
    R, U, L = _universal_ring()
    g = [R.zero] * (D + 1)
    # (U/Λ) log(1 + ΛT) = sum_k (-1)^{k-1}/k U Λ^{k-1} T^k
    for k in range(1, D + 1):
        g[k] += QQ((-1) ** (k - 1), k) * U * L ** (k - 1)
    r = 1
    while p**r <= D:
        pr, pr1 = p**r, p ** (r - 1)
        k = 1
        while k * pr <= D:
            base = QQ((-1) ** (k - 1), k) * QQ(1, pr)
            g[k * pr] += base * (U**pr * L ** (k * pr - pr) - U**pr1 * L ** (k * pr - pr1))
            k += 1
        r += 1
    f = _exp_poly(g, D, R)
    for c in f:
        _assert_p_integral(c, p)
    return tuple(f)


def _eval_universal(poly, a, mu, ring, cache):
    acc = ring.zero
    for (i, j), c in poly.terms():
        key = ("U", i)
        if key not in cache:
            cache[key] = ring.pow(a, i)
        key2 = ("L", j)
        if key2 not in cache:
            cache[key2] = ring.pow(mu, j)
        c = QQ.to_sympy(c)
        coef = ring.from_fraction(Fraction(int(c.p), int(c.q)))
        acc = ring.add(acc, ring.mul(coef, ring.mul(cache[key], cache[key2])))
    return acc


def deformed_ep(a, mu, D: int, ring) -> TruncatedSeries:
    """E_p(a, μ; T) up to degree D with a, μ raw elements of ``ring``."""
    p = ring.p
    cache = {}
    return TruncatedSeries(ring, [_eval_universal(c, a, mu, ring, cache) for c in universal_ep(p, D)])


def ep_closed_form(a, mu, ring) -> TruncatedSeries:
    """1 + sum_{i<p} prod_{k<i}(a - kμ)/i! T^i."""
    p = ring.p
    coeffs = [ring.one]
    prod = ring.one
    for i in range(1, p):
        prod = ring.mul(prod, ring.sub(a, ring.mul(ring.from_int(i - 1), mu)))
        coeffs.append(ring.mul(prod, ring.from_fraction(Fraction(1, math.factorial(i)))))
    return TruncatedSeries(ring, coeffs)


def ep_witt(a: WittVector, mu, D: int) -> TruncatedSeries:
    """prod_k E_p(a_k, μ^{p^k}; T^{p^k}) truncated at degree D."""
    ring, p = a.ring, a.p
    out = TruncatedSeries(ring, [ring.one], degree=D)
    for k, x in enumerate(a.entries):
        if ring.is_zero(x) or p**k > D:
            continue
        factor = deformed_ep(x, ring.pow(mu, p**k), D // p**k, ring).substitute_power(p**k, D)
        out = out * factor
    return out
