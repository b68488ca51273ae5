"""Truncated discrete valuation rings and their finite quotients.

Two flavours are supported:

* mixed characteristic, R = Z_p[u]/E(u) with E Eisenstein of degree e,
  stored as (Z/p^N)[u]/E(u): e integer coefficients modulo p^N, which is
  R/π^{eN} on the nose;
* equal characteristic, R = F_q[[π]], stored as F_q[π]/π^N.

Raw elements are tuples so that the polynomial engines can call the ring
methods in tight loops.  :class:`DvrElement` is the immutable user-facing
wrapper with operators.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import (
    ConfigError,
    InfiniteResidueField,
    InsufficientPrecision,
    NonIntegralCoefficient,
    NonUnit,
    NotDivisible,
    SpecMismatch,
)

INF = math.inf

Residue = tuple


def vp(n: int, p: int) -> float:
    """p-adic valuation of an integer (INF for 0)."""
    if n == 0:
        return INF
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def prime_power_exponent(q: int, p: int) -> int:
    f = 0
    while q % p == 0:
        q //= p
        f += 1
    if q != 1 or f == 0:
        raise ConfigError(f"q={q * p**f} is not a power of p={p}")
    return f


class GaloisField:
    """F_q with q = p^f; elements are ints whose base-p digits are the
    coefficients of a polynomial modulo a fixed irreducible."""

    def __init__(self, p: int, f: int = 1):
        self.p, self.f, self.q = p, f, p**f
        if f == 1:
            self.modulus = (0, 1)
            return
        self.modulus = self._find_irreducible()
        q = self.q
        self._mul = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]
        self._add = [[self._from_digits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])
                      for b in range(q)] for a in range(q)]
        self._neg = [self._from_digits([(-x) % p for x in self._digits(a)]) for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    self._inv[a] = b
                    break

    def _digits(self, a):
        out = []
        for _ in range(self.f):
            out.append(a % self.p)
            a //= self.p
        return out

    def _from_digits(self, d):
        return sum(c * self.p**i for i, c in enumerate(d))

    def _polymulmod(self, a, b, mod):
        p, f = self.p, len(mod) - 1
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(len(prod) - 1, f - 1, -1):
            c = prod[k]
            if c:
                for i in range(f + 1):
                    prod[k - f + i] = (prod[k - f + i] - c * mod[i]) % p
        return prod[:f] + [0] * (f - len(prod[:f]))

    def _slow_mul(self, a, b):
        return self._from_digits(self._polymulmod(self._digits(a), self._digits(b), self.modulus))

    def _find_irreducible(self):
        p, f = self.p, self.f
        for tail in itertools.product(range(p), repeat=f):
            cand = list(tail) + [1]
            if cand[0] == 0:
                continue
            if all(self._has_no_factor(cand, d) for d in range(1, f // 2 + 1)):
                return tuple(cand)
        raise ConfigError("no irreducible polynomial found")

    def _has_no_factor(self, poly, d):
        p = self.p
        for tail in itertools.product(range(p), repeat=d):
            div = list(tail) + [1]
            rem = list(poly)
            for k in range(len(rem) - 1, d - 1, -1):
                c = rem[k]
                if c:
                    for i in range(d + 1):
                        rem[k - d + i] = (rem[k - d + i] - c * div[i]) % p
            if not any(rem[:d]):
                return False
        return True

    def add(self, a, b):
        return (a + b) % self.p if self.f == 1 else self._add[a][b]

    def mul(self, a, b):
        return (a * b) % self.p if self.f == 1 else self._mul[a][b]

    def neg(self, a):
        return (-a) % self.p if self.f == 1 else self._neg[a]

    def inv(self, a):
        if a == 0:
            raise NonUnit("0 has no inverse in the residue field")
        return pow(a, -1, self.p) if self.f == 1 else self._inv[a]

    def frob(self, a):
        r = 1
        for _ in range(self.p):
            r = self.mul(r, a)
        return r


@dataclass(frozen=True)
class DvrSpec:
    """Configuration of a truncated d.v.r.

    ``eisenstein`` lists the coefficients of E(u) from the constant term
    up to the leading 1.  ``precision`` is N: mixed rings keep p-adic
    coefficients modulo p^N (π-adic cap e·N), equal-characteristic rings
    keep N π-adic digits.
    """

    p: int
    case: str = "equal"
    e: int = 1
    eisenstein: tuple = ()
    q: int = 0
    precision: int = 32
    f: int = field(default=1, compare=False)

    def __post_init__(self):
        p = self.p
        if not is_prime(p):
            raise ConfigError(f"p={p} is not prime")
        if self.case not in ("mixed", "equal"):
            raise ConfigError(f"unknown case {self.case!r}")
        if self.precision < 1:
            raise ConfigError("precision must be at least 1")
        if self.case == "equal":
            q = self.q or p
            object.__setattr__(self, "q", q)
            object.__setattr__(self, "f", prime_power_exponent(q, p))
            object.__setattr__(self, "e", 1)
            object.__setattr__(self, "eisenstein", ())
            return
        if self.q not in (0, p):
            raise ConfigError("mixed characteristic supports residue field F_p only")
        object.__setattr__(self, "q", p)
        coeffs = tuple(int(c) for c in self.eisenstein) or (-p,) + (0,) * (self.e - 1) + (1,)
        e = len(coeffs) - 1
        if self.eisenstein and self.e not in (1, e) and self.e != e:
            raise ConfigError(f"e={self.e} disagrees with Eisenstein degree {e}")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "eisenstein", coeffs)
        if e < 1 or coeffs[-1] != 1:
            raise ConfigError("Eisenstein polynomial must be monic of degree >= 1")
        if any(c % p for c in coeffs[:-1]) or vp(coeffs[0], p) != 1:
            raise ConfigError(f"E(u)={coeffs} is not Eisenstein at p={p}")
        if self.precision < 2:
            raise ConfigError("mixed characteristic needs precision N >= 2")

    @property
    def mixed(self) -> bool:
        return self.case == "mixed"

    @property
    def cap(self) -> int:
        return self.e * self.precision if self.mixed else self.precision

    @classmethod
    def equal_char(cls, p: int, q: int | None = None, precision: int = 32) -> "DvrSpec":
        return cls(p=p, case="equal", q=q or p, precision=precision)

    @classmethod
    def mixed_char(cls, p: int, eisenstein=None, e: int = 1, precision: int = 16) -> "DvrSpec":
        return cls(p=p, case="mixed", e=e, eisenstein=tuple(eisenstein or ()), precision=precision)

    @classmethod
    def cyclotomic(cls, p: int, k: int = 2, precision: int = 16) -> "DvrSpec":
        """R = Z_p[ζ_{p^k}] with uniformizer π = ζ_{p^k} − 1."""
        return cls.mixed_char(p, cyclotomic_eisenstein(p, k), precision=precision)

    def with_precision(self, precision: int) -> "DvrSpec":
        return DvrSpec(self.p, self.case, self.e, self.eisenstein, self.q, precision)

    def describe(self) -> dict:
        d = {"p": self.p, "case": self.case, "precision": self.precision}
        if self.mixed:
            d["e"] = self.e
            d["eisenstein"] = list(self.eisenstein)
        else:
            d["q"] = self.q
        return d


def cyclotomic_eisenstein(p: int, k: int) -> tuple:
    """Coefficients of Φ_{p^k}(1+u), the minimal polynomial of ζ_{p^k} − 1."""
    n = p ** (k - 1)
    total = [0] * (n * (p - 1) + 1)
    for i in range(p):
        m = i * n
        for j in range(m + 1):
            total[j] += math.comb(m, j)
    return tuple(total)


def parse_config(text: str) -> DvrSpec:
    """Parse ``key=value`` lines (``#`` comments allowed) into a DvrSpec.

    Keys: p, case (mixed|equal), e, q, eisenstein (comma separated,
    constant term first), cyclotomic (k for π = ζ_{p^k} − 1), precision.
    """
    values = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"malformed config line {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.lower()] = val
    try:
        p = int(values["p"])
    except (KeyError, ValueError) as exc:
        raise ConfigError("config must name an integer p") from exc
    case = values.get("case", "mixed" if ("eisenstein" in values or "cyclotomic" in values or "e" in values) else "equal")
    precision = int(values["precision"]) if "precision" in values else None
    try:
        if case == "equal":
            return DvrSpec.equal_char(p, int(values.get("q", p)), precision or 32)
        if "cyclotomic" in values:
            return DvrSpec.cyclotomic(p, int(values["cyclotomic"]), precision or 16)
        coeffs = parse_int_list(values["eisenstein"]) if "eisenstein" in values else None
        return DvrSpec.mixed_char(p, coeffs, e=int(values.get("e", 1)), precision=precision or 16)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_int_list(text: str) -> list:
    text = text.strip().strip("[]()")
    return [int(tok) for tok in text.replace(",", " ").split()]


class Dvr:
    """The ring R/π^cap for a given :class:`DvrSpec`."""

    def __init__(self, spec: DvrSpec):
        self.spec = spec
        self.p = p = spec.p
        self.mixed = spec.mixed
        self.e = spec.e
        self.cap = spec.cap
        self.q = spec.q
        if self.mixed:
            e = self.e
            self.width = e
            self.modulus = M = p**spec.precision
            coeffs = spec.eisenstein
            self._red = tuple((-c) % M for c in coeffs[:e])
            winv = pow((coeffs[0] // p) % M, -1, M)
            self._p_over_u = tuple((-winv * coeffs[i + 1]) % M for i in range(e))
            self.field = GaloisField(p, 1)
        else:
            self.width = spec.precision
            self.modulus = p
            self.field = GaloisField(p, spec.f)
        self.zero = (0,) * self.width
        self.one = (1,) + (0,) * (self.width - 1)
        self._pi_pows = [self.one]

    @staticmethod
    @functools.lru_cache(maxsize=None)
    def of(spec: DvrSpec) -> "Dvr":
        return Dvr(spec)

    def __repr__(self):
        if self.mixed:
            return f"Dvr(p={self.p}, E={list(self.spec.eisenstein)}, N={self.spec.precision})"
        return f"Dvr(F_{self.q}[[π]], N={self.spec.precision})"

    # -- raw arithmetic -------------------------------------------------

    def add(self, a, b):
        if self.mixed or self.field.f == 1:
            M = self.modulus
            return tuple((x + y) % M for x, y in zip(a, b))
        fa = self.field._add
        return tuple(fa[x][y] for x, y in zip(a, b))

    def neg(self, a):
        if self.mixed or self.field.f == 1:
            M = self.modulus
            return tuple((-x) % M for x in a)
        fn = self.field._neg
        return tuple(fn[x] for x in a)

    def sub(self, a, b):
        if self.mixed or self.field.f == 1:
            M = self.modulus
            return tuple((x - y) % M for x, y in zip(a, b))
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.mixed:
            return self._mul_mixed(a, b)
        return self._mul_equal(a, b)

    def _mul_mixed(self, a, b):
        e, M = self.e, self.modulus
        if e == 1:
            return ((a[0] * b[0]) % M,)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        red = self._red
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k] % M
            if c:
                base = k - e
                for i, r in enumerate(red):
                    prod[base + i] += c * r
        return tuple(x % M for x in prod[:e])

    def _mul_equal(self, a, b):
        n = self.width
        na = [(i, x) for i, x in enumerate(a) if x]
        if not na:
            return self.zero
        nb = [(j, y) for j, y in enumerate(b) if y]
        if self.field.f == 1:
            out = [0] * n
            for i, x in na:
                for j, y in nb:
                    k = i + j
                    if k >= n:
                        break
                    out[k] += x * y
            p = self.p
            return tuple(v % p for v in out)
        fm, fa = self.field._mul, self.field._add
        out = [0] * n
        for i, x in na:
            row = fm[x]
            for j, y in nb:
                k = i + j
                if k >= n:
                    break
                out[k] = fa[out[k]][row[y]]
        return tuple(out)

    def smul(self, a, n: int):
        return self.mul(a, self.from_int(n))

    def pow(self, a, k: int):
        if k < 0:
            return self.pow(self.inv(a), -k)
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def is_zero(self, a) -> bool:
        return not any(a)

    def eq(self, a, b) -> bool:
        return a == b

    def from_int(self, n: int):
        if self.mixed:
            return (n % self.modulus,) + (0,) * (self.width - 1)
        return (n % self.p,) + (0,) * (self.width - 1)

    def from_fraction(self, x) -> tuple:
        x = Fraction(x)
        num, den = x.numerator, x.denominator
        k = vp(den, self.p)
        if k:
            if self.mixed and vp(num, self.p) >= k:
                num //= self.p**k
                den //= self.p**k
            else:
                raise NonIntegralCoefficient(f"{x} is not p-integral")
        return self.mul(self.from_int(num), self.inv(self.from_int(den)))

    def val(self, a) -> float:
        if self.mixed:
            best = INF
            e, p = self.e, self.p
            for i, c in enumerate(a):
                if c:
                    v = e * vp(c, p) + i
                    if v < best:
                        best = v
            return best
        for i, c in enumerate(a):
            if c:
                return i
        return INF

    def is_unit(self, a) -> bool:
        return self.val(a) == 0

    def inv(self, a):
        if self.val(a) != 0:
            raise NonUnit("element has positive valuation")
        if self.mixed:
            y = (pow(a[0], -1, self.modulus),) + (0,) * (self.width - 1)
        else:
            y = (self.field.inv(a[0]),) + (0,) * (self.width - 1)
        two = self.from_int(2)
        for _ in range(self.cap.bit_length() + 2):
            xy = self.mul(a, y)
            if xy == self.one:
                return y
            y = self.mul(y, self.sub(two, xy)) if self.p != 2 or self.mixed else self._newton_char2(a, y)
        if self.mul(a, y) != self.one:
            raise ArithmeticError("inverse did not converge")
        return y

    def _newton_char2(self, a, y):
        # 2 = 0 here, so use y(2 - ay) = y(ay) ... fall back on y + y(1 - ay)
        return self.add(y, self.mul(y, self.sub(self.one, self.mul(a, y))))

    def pi(self):
        return self.pi_power(1)

    def pi_power(self, k: int):
        pows = self._pi_pows
        while len(pows) <= k:
            if self.mixed:
                pows.append(self._times_u(pows[-1]))
            else:
                n = len(pows)
                pows.append(tuple(1 if i == n else 0 for i in range(self.width)))
        return pows[k]

    def _times_u(self, a):
        e, M = self.e, self.modulus
        if e == 1:
            return ((a[0] * self._red[0]) % M,)
        top = a[-1]
        out = [0] + list(a[:-1])
        if top:
            for i, r in enumerate(self._red):
                out[i] = (out[i] + top * r) % M
        return tuple(out)

    def div_pi(self, a, t: int = 1):
        """Exact division by π^t; the top t digits of the result are unknown."""
        if t == 0:
            return a
        if self.val(a) < t:
            raise NotDivisible(f"valuation {self.val(a)} < {t}")
        if not self.mixed:
            return tuple(a[t:]) + (0,) * t
        p, M = self.p, self.modulus
        for _ in range(t):
            c0 = a[0] // p
            out = list(a[1:]) + [0]
            for i, r in enumerate(self._p_over_u):
                out[i] += c0 * r
            a = tuple(x % M for x in out)
        return a

    def div(self, a, b):
        """Exact quotient a/b for b ≠ 0."""
        vb = self.val(b)
        if vb == INF:
            raise NotDivisible("division by zero")
        ub = self.div_pi(b, vb)
        return self.mul(self.div_pi(a, vb), self.inv(ub))

    def truncate(self, a, t: int):
        """Canonical representative of a modulo π^t (digits beyond t dropped)."""
        return self.from_digits(self.digits(a, t))

    def digits(self, a, n: int) -> Residue:
        """The first n π-adic digits of a (each a residue-field element)."""
        if n > self.cap:
            raise InsufficientPrecision(f"asked for {n} digits at cap {self.cap}")
        if not self.mixed:
            return tuple(a[:n])
        p, out = self.p, []
        for _ in range(n):
            d = a[0] % p
            out.append(d)
            if d:
                a = self.sub(a, self.from_int(d))
            a = self.div_pi(a, 1) if any(a) else a
        return tuple(out)

    def from_digits(self, digits) -> tuple:
        acc = self.zero
        for i, d in enumerate(digits):
            if d:
                if self.mixed:
                    acc = self.add(acc, self.smul(self.pi_power(i), d))
                else:
                    acc = acc[:i] + (d,) + acc[i + 1:]
        return acc

    def promote(self, raw, target: "Dvr"):
        """Reinterpret a raw element in the same ring at another precision."""
        if target.spec.with_precision(self.spec.precision) != self.spec:
            raise SpecMismatch("promotion between different rings")
        if self.mixed:
            return tuple(c % target.modulus for c in raw)
        return (tuple(raw) + (0,) * target.width)[: target.width]

    def elem(self, raw) -> "DvrElement":
        return DvrElement(self, raw)

    # -- convenience constructors --------------------------------------

    def __call__(self, x) -> "DvrElement":
        if isinstance(x, DvrElement):
            self._check(x)
            return x
        if isinstance(x, (int, Fraction)):
            return DvrElement(self, self.from_fraction(x))
        if isinstance(x, (tuple, list)):
            return DvrElement(self, self.from_digits(x))
        raise TypeError(f"cannot coerce {x!r}")

    def uniformizer(self) -> "DvrElement":
        return DvrElement(self, self.pi())

    def p_element(self) -> "DvrElement":
        return DvrElement(self, self.from_int(self.p))

    def _check(self, x: "DvrElement"):
        if x.ring is not self and x.ring.spec != self.spec:
            raise SpecMismatch("elements live in different rings")

    @property
    def characteristic(self) -> int:
        return 0 if self.mixed else self.p

    @property
    def p_is_zero(self) -> bool:
        return not self.mixed

    @property
    def v_p(self) -> float:
        """v(p): e in mixed characteristic, ∞ in equal characteristic."""
        return self.e if self.mixed else INF


def ring_of(spec: DvrSpec) -> Dvr:
    return Dvr.of(spec)


class DvrElement:
    """Immutable element of a truncated d.v.r."""

    __slots__ = ("ring", "raw")

    def __init__(self, ring: Dvr, raw):
        self.ring = ring
        self.raw = tuple(raw)

    def _other(self, y):
        if isinstance(y, DvrElement):
            self.ring._check(y)
            return y.raw
        if isinstance(y, (int, Fraction)):
            return self.ring.from_fraction(y)
        return NotImplemented

    def __add__(self, y):
        b = self._other(y)
        return NotImplemented if b is NotImplemented else DvrElement(self.ring, self.ring.add(self.raw, b))

    __radd__ = __add__

    def __sub__(self, y):
        b = self._other(y)
        return NotImplemented if b is NotImplemented else DvrElement(self.ring, self.ring.sub(self.raw, b))

    def __rsub__(self, y):
        b = self._other(y)
        return NotImplemented if b is NotImplemented else DvrElement(self.ring, self.ring.sub(b, self.raw))

    def __mul__(self, y):
        b = self._other(y)
        return NotImplemented if b is NotImplemented else DvrElement(self.ring, self.ring.mul(self.raw, b))

    __rmul__ = __mul__

    def __neg__(self):
        return DvrElement(self.ring, self.ring.neg(self.raw))

    def __pow__(self, k: int):
        return DvrElement(self.ring, self.ring.pow(self.raw, k))

    def __truediv__(self, y):
        b = self._other(y)
        return NotImplemented if b is NotImplemented else DvrElement(self.ring, self.ring.div(self.raw, b))

    def __eq__(self, y):
        b = self._other(y)
        if b is NotImplemented:
            return NotImplemented
        return self.raw == b

    def __hash__(self):
        return hash((self.ring.spec, self.raw))

    def __repr__(self):
        v = self.valuation()
        if v == INF:
            return "DvrElement(0)"
        return f"DvrElement({list(self.raw) if self.ring.mixed else self._series()}, v={v})"

    def _series(self):
        terms = [f"{c}π^{i}" if i else f"{c}" for i, c in enumerate(self.raw) if c]
        return " + ".join(terms[:8]) + (" + …" if len(terms) > 8 else "")

    def valuation(self) -> float:
        return self.ring.val(self.raw)

    def is_zero(self) -> bool:
        return not any(self.raw)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "DvrElement":
        return DvrElement(self.ring, self.ring.inv(self.raw))

    def exact_divide(self, t: int) -> "DvrElement":
        return DvrElement(self.ring, self.ring.div_pi(self.raw, t))

    def eq_mod(self, y, t: int) -> bool:
        """x ≡ y modulo π^t."""
        return (self - y).valuation() >= t

    def digits(self, n: int) -> Residue:
        return self.ring.digits(self.raw, n)


# free-function spellings used in docs and tests

def dvr_add(x: DvrElement, y: DvrElement) -> DvrElement:
    return x + y


def dvr_mul(x: DvrElement, y: DvrElement) -> DvrElement:
    return x * y


def dvr_neg(x: DvrElement) -> DvrElement:
    return -x


def dvr_inv(x: DvrElement) -> DvrElement:
    return x.inverse()


def valuation(x: DvrElement) -> float:
    return x.valuation()


def exact_divide(x: DvrElement, t: int) -> DvrElement:
    return x.exact_divide(t)


class QuotientRing:
    """R/λR, identified with R/π^n for n = v(λ).

    Residues are tuples of n π-adic digits; the lexicographic order on
    these tuples is the fixed enumeration order used for canonical coset
    representatives.  The raw-arithmetic methods make a QuotientRing
    usable as a coefficient ring for Witt vectors and polynomials.
    """

    def __init__(self, dvr: Dvr, n: int):
        if n == INF or n < 0:
            raise ConfigError("modulus must be a nonzero element")
        n = int(n)
        if n >= dvr.cap:
            raise InsufficientPrecision(f"v(λ)={n} needs more than cap {dvr.cap}")
        self.dvr, self.n, self.p, self.q = dvr, n, dvr.p, dvr.q
        self.zero = (0,) * n
        self.one = dvr.digits(dvr.one, n)

    @classmethod
    def of(cls, lam: DvrElement) -> "QuotientRing":
        return cls(lam.ring, lam.valuation())

    def __repr__(self):
        return f"QuotientRing({self.dvr!r}, v(λ)={self.n})"

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and other.n == self.n and other.dvr.spec == self.dvr.spec

    def __hash__(self):
        return hash((self.dvr.spec, self.n))

    @property
    def size(self) -> int:
        return self.q**self.n

    @property
    def is_zero_ring(self) -> bool:
        return self.n == 0

    @property
    def p_is_zero(self) -> bool:
        return (not self.dvr.mixed) or self.n <= self.dvr.e

    @property
    def characteristic(self) -> int:
        return self.dvr.characteristic

    def reduce(self, x) -> Residue:
        raw = x.raw if isinstance(x, DvrElement) else x
        return self.dvr.digits(raw, self.n)

    def lift(self, r: Residue) -> DvrElement:
        return DvrElement(self.dvr, self.dvr.from_digits(r))

    def lift_raw(self, r: Residue):
        return self.dvr.from_digits(r)

    def residues(self) -> Iterator[Residue]:
        if self.q is None:
            raise InfiniteResidueField("residue field is not finite")
        return itertools.product(range(self.q), repeat=self.n)

    def nilpotents(self) -> Iterator[Residue]:
        if self.n == 0:
            yield self.zero
            return
        for tail in itertools.product(range(self.q), repeat=self.n - 1):
            yield (0,) + tail

    def is_nilpotent(self, r: Residue) -> bool:
        return self.n == 0 or r[0] == 0

    def valuation(self, r: Residue) -> float:
        for i, d in enumerate(r):
            if d:
                return i
        return INF

    # -- coefficient-ring protocol on residues --------------------------

    def _op(self, f, *args):
        d = self.dvr
        return d.digits(f(*(d.from_digits(a) for a in args)), self.n)

    def add(self, a, b):
        if not self.dvr.mixed:
            return self._eq_add(a, b)
        return self._op(self.dvr.add, a, b)

    def _eq_add(self, a, b):
        fld = self.dvr.field
        return tuple(fld.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if not self.dvr.mixed:
            fld = self.dvr.field
            return tuple(fld.neg(x) for x in a)
        return self._op(self.dvr.neg, a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not self.dvr.mixed:
            n = self.n
            pa = tuple(a) + (0,) * (self.dvr.width - n)
            pb = tuple(b) + (0,) * (self.dvr.width - n)
            return self.dvr.mul(pa, pb)[:n]
        return self._op(self.dvr.mul, a, b)

    def pow(self, a, k: int):
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def from_int(self, m: int):
        return self.dvr.digits(self.dvr.from_int(m), self.n)

    def inv(self, a):
        if self.n and a[0] == 0:
            raise NonUnit("residue is not a unit")
        return self._op(self.dvr.inv, a) if self.n else a

    def val(self, a) -> float:
        return self.valuation(a)

    def from_fraction(self, x):
        return self.dvr.digits(self.dvr.from_fraction(x), self.n)

    def from_element(self, x: DvrElement):
        return self.reduce(x)

    def is_zero(self, a) -> bool:
        return not any(a)

    def eq(self, a, b) -> bool:
        return tuple(a) == tuple(b)


def reduce_mod(x: DvrElement, q: QuotientRing) -> Residue:
    return q.reduce(x)


def lift(r: Residue, q: QuotientRing) -> DvrElement:
    return q.lift(r)


def enumerate_residues(q: QuotientRing) -> Iterator[Residue]:
    return q.residues()


def require_precision(dvr: Dvr, depth: int, guard: int | None = None) -> None:
    """Refuse computations whose divisions reach within ``guard`` digits of the cap."""
    guard = dvr.e if guard is None else guard
    if dvr.cap <= depth + guard:
        raise InsufficientPrecision(
            f"need π-adic cap > {depth + guard}, have {dvr.cap}; raise the precision N"
        )
