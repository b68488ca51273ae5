"""Multivariate polynomial algebras with triangular monic relations.

An :class:`Algebra` is R[x_0..x_{k-1}] / (relations) [1/units] where

* each relation is monic in one variable and mentions only that variable
  and earlier ones, so reduction (variables processed from last to first)
  gives a unique normal form: the quotient is free over R on the monomials
  below the relation degrees;
* units are polynomials that are declared invertible; elements are
  fractions num / prod(units^k) with nonnegative exponents.

Coefficients are raw values of a coefficient ring (a :class:`Dvr` or a
:class:`QuotientRing`), manipulated only through its ring methods.
"""

from __future__ import annotations

from .errors import NotDivisible, SpecMismatch


class Algebra:
    """``horizon``: coefficients are only trusted modulo π^horizon (None means
    exact).  Exact divisions leave unknown digits near the top of the
    truncated ring, so equality tests compare below the horizon."""

    def __init__(self, ring, names, relations=None, units=(), horizon=None):
        self.ring = ring
        self.horizon = horizon
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.relations = {}
        self.degrees = {}
        self.units = []
        self._tables = {}
        self._unit_pows = None
        for i, rel in (relations or {}).items():
            self.add_relation(i, rel)
        for u in units:
            self.add_unit(u)

    def __repr__(self):
        rels = ", ".join(f"{self.names[i]}^{d}" for i, d in sorted(self.degrees.items()))
        return f"Algebra({', '.join(self.names)}; lead {rels or 'none'}; {len(self.units)} units)"

    # -- setup -----------------------------------------------------------

    def add_relation(self, i, rel):
        poly = rel.num if isinstance(rel, Elem) else rel
        d = max((m[i] for m in poly), default=0)
        lead = [(m, c) for m, c in poly.items() if m[i] == d]
        if d == 0 or len(lead) != 1 or any(m[j] for m, _ in lead for j in range(self.nvars) if j != i) \
                or lead[0][1] != self.ring.one:
            raise ValueError(f"relation for {self.names[i]} is not monic in that variable")
        if any(m[j] for m in poly for j in range(i + 1, self.nvars)):
            raise ValueError(f"relation for {self.names[i]} mentions a later variable")
        self.relations[i] = dict(poly)
        self.degrees[i] = d
        self._tables = {}

    def add_unit(self, u):
        poly = u.num if isinstance(u, Elem) else u
        self.units.append(self.reduce(dict(poly)))
        self._unit_pows = None

    def _negligible(self, poly):
        R, h = self.ring, self.horizon
        return all(R.val(c) >= h for c in poly.values())

    @property
    def is_finite(self) -> bool:
        return len(self.degrees) == self.nvars and not self.units

    def rank(self) -> int:
        r = 1
        for i in range(self.nvars):
            if i not in self.degrees:
                return -1
            r *= self.degrees[i]
        return r

    # -- raw polynomial arithmetic (dicts) --------------------------------

    def _unit_mono(self):
        return (0,) * self.nvars

    def padd(self, a, b):
        R = self.ring
        out = dict(a)
        for m, c in b.items():
            if m in out:
                s = R.add(out[m], c)
                if R.is_zero(s):
                    del out[m]
                else:
                    out[m] = s
            elif not R.is_zero(c):
                out[m] = c
        return out

    def pneg(self, a):
        return {m: self.ring.neg(c) for m, c in a.items()}

    def psub(self, a, b):
        return self.padd(a, self.pneg(b))

    def pscale(self, a, c):
        R = self.ring
        out = {}
        for m, x in a.items():
            y = R.mul(x, c)
            if not R.is_zero(y):
                out[m] = y
        return out

    def pmul_raw(self, a, b):
        R = self.ring
        out = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                c = R.mul(c1, c2)
                if m in out:
                    out[m] = R.add(out[m], c)
                else:
                    out[m] = c
        return {m: c for m, c in out.items() if not R.is_zero(c)}

    def pmul(self, a, b):
        return self.reduce(self.pmul_raw(a, b))

    def ppow(self, a, k):
        result = {self._unit_mono(): self.ring.one}
        base = a
        while k:
            if k & 1:
                result = self.pmul(result, base)
            k >>= 1
            if k:
                base = self.pmul(base, base)
        return result

    def _power(self, i, k):
        table = self._tables.setdefault(i, {})
        if k in table:
            return table[k]
        d = self.degrees[i]
        if k < d:
            mono = [0] * self.nvars
            mono[i] = k
            res = {tuple(mono): self.ring.one}
        elif k == d:
            mono = [0] * self.nvars
            mono[i] = d
            res = self.reduce(self.psub({tuple(mono): self.ring.one}, self.relations[i]))
        else:
            mono = [0] * self.nvars
            mono[i] = 1
            res = self.reduce(self.pmul_raw({tuple(mono): self.ring.one}, self._power(i, k - 1)))
        table[k] = res
        return res

    def reduce(self, poly):
        R = self.ring
        for i in sorted(self.degrees, reverse=True):
            d = self.degrees[i]
            if all(m[i] < d for m in poly):
                continue
            out = {}
            for m, c in poly.items():
                k = m[i]
                if k < d:
                    if m in out:
                        out[m] = R.add(out[m], c)
                    else:
                        out[m] = c
                    continue
                rest = m[:i] + (0,) + m[i + 1:]
                for m2, c2 in self._power(i, k).items():
                    mm = tuple(x + y for x, y in zip(rest, m2))
                    cc = R.mul(c, c2)
                    if mm in out:
                        out[mm] = R.add(out[mm], cc)
                    else:
                        out[mm] = cc
            poly = {m: c for m, c in out.items() if not R.is_zero(c)}
        return {m: c for m, c in poly.items() if not R.is_zero(c)}

    # -- elements ---------------------------------------------------------

    def elem(self, num, den=None):
        return Elem(self, self.reduce(num), den or (0,) * len(self.units))

    def gen(self, i):
        if isinstance(i, str):
            i = self.names.index(i)
        mono = [0] * self.nvars
        mono[i] = 1
        return self.elem({tuple(mono): self.ring.one})

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def const(self, c):
        """Constant from a raw coefficient."""
        if self.ring.is_zero(c):
            return self.zero()
        return Elem(self, {self._unit_mono(): c}, (0,) * len(self.units))

    def from_int(self, n):
        return self.const(self.ring.from_int(n))

    def coerce_scalar(self, x):
        """Raw coefficient for a DvrElement (reduced if the ring is a quotient)."""
        if hasattr(self.ring, "reduce"):
            return self.ring.reduce(x)
        return x.raw

    def zero(self):
        return Elem(self, {}, (0,) * len(self.units))

    def one(self):
        return self.const(self.ring.one)

    def unit(self, k):
        return Elem(self, dict(self.units[k]), (0,) * len(self.units))

    def unit_inverse(self, k):
        den = [0] * len(self.units)
        den[k] = 1
        return Elem(self, {self._unit_mono(): self.ring.one}, tuple(den))

    def _unit_power(self, k, e):
        cache = self._unit_pows
        if cache is None:
            cache = self._unit_pows = {}
        key = (k, e)
        if key not in cache:
            cache[key] = self.ppow(self.units[k], e)
        return cache[key]

    def _clear(self, num, extra):
        for k, e in enumerate(extra):
            if e:
                num = self.pmul(num, self._unit_power(k, e))
        return num

    def eval_univariate(self, coeffs, x):
        """Horner evaluation of sum coeffs[k] x^k (raw coefficients)."""
        acc = self.zero()
        for c in reversed(coeffs):
            acc = acc * x + self.const(c)
        return acc

    def tensor(self, other, prefixes=("X", "Y")) -> "TensorAlgebra":
        return TensorAlgebra([self, other], prefixes)

    def embed_poly(self, poly, offset, total):
        """Shift a polynomial of this algebra into variables offset.. of a larger one."""
        pad_l = (0,) * offset
        pad_r = (0,) * (total - offset - self.nvars)
        return {pad_l + m + pad_r: c for m, c in poly.items()}

    def format(self, elem) -> str:
        def mono(m):
            parts = []
            for name, k in zip(self.names, m):
                if k == 1:
                    parts.append(name)
                elif k:
                    parts.append(f"{name}^{k}")
            return "*".join(parts) or "1"
        terms = [f"({_fmt_coeff(self.ring, c)})*{mono(m)}" for m, c in sorted(elem.num.items())]
        s = " + ".join(terms) or "0"
        if any(elem.den):
            d = "*".join(f"u{k}^{e}" for k, e in enumerate(elem.den) if e)
            s = f"({s})/({d})"
        return s


def _fmt_coeff(ring, c):
    if isinstance(c, tuple):
        return ",".join(str(x) for x in c)
    return str(c)


class Elem:
    """num / prod(units^den) in an Algebra; immutable."""

    __slots__ = ("alg", "num", "den")

    def __init__(self, alg, num, den):
        self.alg, self.num, self.den = alg, num, tuple(den)

    def _coerce(self, y):
        if isinstance(y, Elem):
            if y.alg is not self.alg:
                raise SpecMismatch("elements of different algebras")
            return y
        if isinstance(y, int):
            return self.alg.from_int(y)
        if getattr(y, "raw", None) is not None:
            return self.alg.const(self.alg.coerce_scalar(y))
        return NotImplemented

    def _align(self, y):
        alg = self.alg
        g = tuple(max(a, b) for a, b in zip(self.den, y.den))
        a = alg._clear(self.num, [gi - a for gi, a in zip(g, self.den)])
        b = alg._clear(y.num, [gi - b for gi, b in zip(g, y.den)])
        return a, b, g

    def __add__(self, y):
        y = self._coerce(y)
        if y is NotImplemented:
            return y
        if self.den == y.den:
            return Elem(self.alg, self.alg.padd(self.num, y.num), self.den)
        a, b, g = self._align(y)
        return Elem(self.alg, self.alg.padd(a, b), g)

    __radd__ = __add__

    def __neg__(self):
        return Elem(self.alg, self.alg.pneg(self.num), self.den)

    def __sub__(self, y):
        y = self._coerce(y)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, y):
        y = self._coerce(y)
        if y is NotImplemented:
            return y
        return y + (-self)

    def __mul__(self, y):
        y = self._coerce(y)
        if y is NotImplemented:
            return y
        if len(y.num) == 1 and y.num.get(self.alg._unit_mono()) is not None and not any(y.den):
            return Elem(self.alg, self.alg.pscale(self.num, y.num[self.alg._unit_mono()]), self.den)
        return Elem(self.alg, self.alg.pmul(self.num, y.num),
                    tuple(a + b for a, b in zip(self.den, y.den)))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers: use unit_inverse")
        return Elem(self.alg, self.alg.ppow(self.num, k), tuple(k * d for d in self.den))

    def __eq__(self, y):
        y = self._coerce(y)
        if y is NotImplemented:
            return NotImplemented
        if self.den == y.den:
            a, b = self.num, y.num
        else:
            a, b, _ = self._align(y)
        if self.alg.horizon is None:
            return a == b
        return self.alg._negligible(self.alg.psub(a, b))

    __hash__ = None

    def is_zero(self):
        if self.alg.horizon is None:
            return not self.num
        return self.alg._negligible(self.num)

    def __repr__(self):
        return self.alg.format(self)

    def divide(self, c):
        """Exact coefficientwise division of the (normal form) numerator by a raw ring element."""
        R = self.alg.ring
        out = {}
        for m, x in self.num.items():
            if R.val(x) < R.val(c):
                raise NotDivisible(f"coefficient of {m} is not divisible")
            out[m] = R.div(x, c)
        return Elem(self.alg, {m: x for m, x in out.items() if not R.is_zero(x)}, self.den)

    def coefficient(self, mono):
        return self.num.get(tuple(mono), self.alg.ring.zero)

    def map_coefficients(self, f, alg=None):
        alg = alg or self.alg
        R = alg.ring
        num = {}
        for m, c in self.num.items():
            y = f(c)
            if not R.is_zero(y):
                num[m] = y
        return Elem(alg, alg.reduce(num), self.den)

    def valuation(self):
        R = self.alg.ring
        return min((R.val(c) for c in self.num.values()), default=float("inf"))


class TensorAlgebra(Algebra):
    """Tensor product of copies of algebras over the same ring, variables renamed by prefix."""

    def __init__(self, factors, prefixes):
        ring = factors[0].ring
        names, offsets, total = [], [], sum(f.nvars for f in factors)
        for f, pre in zip(factors, prefixes):
            offsets.append(len(names))
            names.extend(pre + n for n in f.names)
        hs = [f.horizon for f in factors if f.horizon is not None]
        super().__init__(ring, names, horizon=min(hs) if hs else None)
        self.factors, self.offsets = list(factors), offsets
        self.unit_offsets = []
        for f, off in zip(factors, offsets):
            for i, rel in sorted(f.relations.items()):
                self.add_relation(i + off, f.embed_poly(rel, off, total))
        for f, off in zip(factors, offsets):
            self.unit_offsets.append(len(self.units))
            for u in f.units:
                self.add_unit(f.embed_poly(u, off, total))

    def inject(self, k, elem):
        """Image of an element of factor k under the k-th coprojection."""
        f, off = self.factors[k], self.offsets[k]
        num = f.embed_poly(elem.num, off, self.nvars)
        den = [0] * len(self.units)
        for i, e in enumerate(elem.den):
            den[self.unit_offsets[k] + i] = e
        return Elem(self, num, tuple(den))


class AlgebraMap:
    """R-algebra map given by generator images and declared unit images.

    ``unit_images[k] = (vec, c)`` asserts that the k-th source unit maps to
    c * prod(target units^vec) with c a unit of the coefficient ring and
    vec a list of integers (negative entries mean inverses).
    """

    def __init__(self, src, dst, gen_images, unit_images=()):
        if len(gen_images) != src.nvars:
            raise ValueError("need one image per generator")
        self.src, self.dst = src, dst
        self.images = list(gen_images)
        self.unit_images = list(unit_images)
        if len(self.unit_images) != len(src.units):
            raise ValueError("need one image per declared unit")
        order = sorted(range(src.nvars), key=lambda i: -len(self.images[i].num))
        self._order = order
        self._memo = {}

    def _mono_image(self, key):
        """key: exponents in self._order order."""
        memo = self._memo
        if key in memo:
            return memo[key]
        k = len(key)
        while k and key[k - 1] == 0:
            k -= 1
        if k == 0:
            res = self.dst.one()
        else:
            prev = key[:k - 1] + (0,) * (len(key) - k + 1)
            last = key[k - 1]
            res = self._mono_image(prev) * self._power(self._order[k - 1], last)
        memo[key] = res
        return res

    def _power(self, i, e):
        key = ("pow", i, e)
        if key not in self._memo:
            self._memo[key] = self.images[i] ** e
        return self._memo[key]

    def _unit_factor(self, k, e):
        vec, c = self.unit_images[k]
        R = self.dst.ring
        num = {self.dst._unit_mono(): R.pow(R.inv(c), e)}
        den = [0] * len(self.dst.units)
        for t, v in enumerate(vec):
            if v > 0:
                den[t] += v * e
            elif v < 0:
                num = self.dst.pmul(num, self.dst._unit_power(t, -v * e))
        return Elem(self.dst, num, tuple(den))

    def __call__(self, x):
        if x.alg is not self.src:
            raise SpecMismatch("map applied to an element of another algebra")
        acc = self.dst.zero()
        for m, c in x.num.items():
            key = tuple(m[i] for i in self._order)
            acc = acc + self._mono_image(key) * self.dst.const(c)
        for k, e in enumerate(x.den):
            if e:
                acc = acc * self._unit_factor(k, e)
        return acc

    def check_units(self):
        """Return the indices of source units whose declared image is wrong."""
        bad = []
        for k, (vec, c) in enumerate(self.unit_images):
            got = self(self.src.unit(k))
            num = {self.dst._unit_mono(): c}
            den = [0] * len(self.dst.units)
            for t, v in enumerate(vec):
                if v > 0:
                    num = self.dst.pmul(num, self.dst._unit_power(t, v))
                elif v < 0:
                    den[t] = -v
            if got != Elem(self.dst, num, tuple(den)):
                bad.append(k)
        return bad

    def kills_relations(self):
        zeros = (0,) * len(self.src.units)
        return all(self(Elem(self.src, dict(rel), zeros)).is_zero() for rel in self.src.relations.values())

    def compose(self, other):
        """self ∘ other."""
        imgs = [self(g) for g in other.images]
        units = []
        for vec, c in other.unit_images:
            total = [0] * len(self.dst.units)
            cc = c
            for t, v in enumerate(vec):
                vec2, c2 = self.unit_images[t]
                for s, w in enumerate(vec2):
                    total[s] += v * w
                R = self.dst.ring
                cc = R.mul(cc, R.pow(c2, v) if v >= 0 else R.pow(R.inv(c2), -v))
            units.append((total, cc))
        return AlgebraMap(other.src, self.dst, imgs, units)
