"""Exact scalars: the perfect closure of the rational function field F_q(x).

Every scalar is a ratio of sparse polynomials whose x-exponents are
rationals with q-power denominators.  An exponent is a normalized pair
``(num, level)`` standing for ``num / q**level`` with ``level == 0`` or
``q`` not dividing ``num``; a :class:`PerfectPoly` maps exponents to
nonzero F_q coefficients, and a :class:`PerfectRational` is a canonical
fraction of two of them (coprime at their common level, monic
denominator).  Canonical form makes equality structural.

The Frobenius x -> x^q and the q-th root are mutually inverse field
automorphisms here; both act on exponents only, because every F_q
coefficient satisfies c^q = c.	That fact is what makes this domain close
under the semilinear scalar actions tau*c = c^q*tau and d*c = c^(1/q)*d.
"""

from __future__ import annotations

import heapq
import re
from fractions import Fraction
from typing import NamedTuple

from .field import FieldConfig, Fq


class QExp(NamedTuple):
    """Rational exponent num / q**level, normalized per field."""

    num: int
    level: int

    def as_fraction(self, q: int) -> Fraction:
        return Fraction(self.num, q ** self.level)


def exp_normalize(num: int, level: int, q: int) -> tuple[int, int]:
    if num == 0:
        return (0, 0)
    while level > 0 and num % q == 0:
        num //= q
        level -= 1
    return (num, level)


def exp_add(a, b, q: int) -> tuple[int, int]:
    la, lb = a[1], b[1]
    if la == lb:
        return exp_normalize(a[0] + b[0], la, q)
    if la < lb:
        return exp_normalize(a[0] * q ** (lb - la) + b[0], lb, q)
    return exp_normalize(a[0] + b[0] * q ** (la - lb), la, q)


def exp_scale_q(e, k: int, q: int) -> tuple[int, int]:
    """Multiply an exponent by q**k (k may be negative)."""
    if k >= 0:
        return exp_normalize(e[0] * q ** k, e[1], q)
    return exp_normalize(e[0], e[1] - k, q)


def exp_lt(a, b, q: int) -> bool:
    return a[0] * q ** b[1] < b[0] * q ** a[1]


def exp_key(e, q: int) -> Fraction:
    return Fraction(e[0], q ** e[1])


class PerfectPoly:
    """Sparse polynomial in x with q-power-fractional exponents."""

    __slots__ = ("field", "terms")

    def __init__(self, field: "PerfectField", terms, _clean=False):
        self.field = field
        if _clean:
            self.terms = terms
            return
        q = field.q
        clean = {}
        for e, c in terms.items():
            if field.nu == 1:
                c = c % field.p
            elif not 0 <= c < q:
                raise ValueError(f"coefficient {c} is not a packed F_{q} element")
            if c:
                e = exp_normalize(e[0], e[1], q) if isinstance(e, tuple) else exp_normalize(e, 0, q)
                if e[0] < 0:
                    raise ValueError("polynomial exponents must be nonnegative")
                prev = clean.get(e)
                if prev is None:
                    clean[e] = c
                else:
                    s = field.fq.add(prev, c)
                    if s:
                        clean[e] = s
                    else:
                        del clean[e]
        self.terms = clean

    # -- basic structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0, 0): 1}

    @property
    def level(self) -> int:
        return max((l for _, l in self.terms), default=0)

    def lead_exp(self):
        """Exponent of the leading term (largest exponent value)."""
        q = self.field.q
        best = None
        for e in self.terms:
            if best is None or exp_lt(best, e, q):
                best = e
        return best

    def lead_coeff(self) -> int:
        e = self.lead_exp()
        return 0 if e is None else self.terms[e]

    def degree(self) -> Fraction:
        e = self.lead_exp()
        if e is None:
            raise ValueError("degree of the zero polynomial")
        return exp_key(e, self.field.q)

    def is_monic(self) -> bool:
        return self.lead_coeff() == 1

    def constant_coeff(self) -> int:
        return self.terms.get((0, 0), 0)

    # -- ring operations ----------------------------------------------------

    def _check_field(self, other):
        if self.field is not other.field and self.field != other.field:
            raise ValueError("operands live over different fields")

    def __add__(self, other: "PerfectPoly") -> "PerfectPoly":
        self._check_field(other)
        fq = self.field.fq
        out = dict(self.terms)
        for e, c in other.terms.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = fq.add(prev, c)
                if s:
                    out[e] = s
                else:
                    del out[e]
        return PerfectPoly(self.field, out, _clean=True)

    def __neg__(self) -> "PerfectPoly":
        fq = self.field.fq
        return PerfectPoly(self.field, {e: fq.neg(c) for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other: "PerfectPoly") -> "PerfectPoly":
        return self + (-other)

    def __mul__(self, other: "PerfectPoly") -> "PerfectPoly":
        self._check_field(other)
        fq = self.field.fq
        q = self.field.q
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        add_t, mul_t = fq._add, fq._mul
        for e1, c1 in a.items():
            row = mul_t[c1]
            for e2, c2 in b.items():
                if e1[1] == e2[1]:
                    e = exp_normalize(e1[0] + e2[0], e1[1], q)
                else:
                    e = exp_add(e1, e2, q)
                c = row[c2]
                prev = out.get(e)
                if prev is None:
                    out[e] = c
                else:
                    s = add_t[prev][c]
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return PerfectPoly(self.field, out, _clean=True)

    def scale(self, c: int) -> "PerfectPoly":
        fq = self.field.fq
        if c == 0:
            return PerfectPoly(self.field, {}, _clean=True)
        if c == 1:
            return self
        return PerfectPoly(self.field, {e: fq.mul(v, c) for e, v in self.terms.items()}, _clean=True)

    def __pow__(self, e: int) -> "PerfectPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        if e == 0:
            return self.field.poly_one()
        # Base-p digits: p-th powers are term-preserving (freshman's dream),
        # so x^(q^a * b) costs only the digit multiplications of b.
        p = self.field.p
        result = None
        cur = self
        while e:
            d = e % p
            e //= p
            for _ in range(d):
                result = cur if result is None else result * cur
            if e:
                cur = cur._pth_power()
        return result

    def _pth_power(self) -> "PerfectPoly":
        p, q = self.field.p, self.field.q
        fq = self.field.fq
        return PerfectPoly(
            self.field,
            {exp_normalize(e[0] * p, e[1], q): fq.pow(c, p) for e, c in self.terms.items()},
            _clean=True,
        )

    # -- the two automorphisms ----------------------------------------------

    def frobenius(self) -> "PerfectPoly":
        """x -> x^q on exponents; coefficients are fixed (c^q = c)."""
        q = self.field.q
        return PerfectPoly(
            self.field,
            {exp_scale_q(e, 1, q): c for e, c in self.terms.items()},
            _clean=True,
        )

    def qth_root(self) -> "PerfectPoly":
        q = self.field.q
        return PerfectPoly(
            self.field,
            {exp_scale_q(e, -1, q): c for e, c in self.terms.items()},
            _clean=True,
        )

    def q_power(self, k: int) -> "PerfectPoly":
        q = self.field.q
        return PerfectPoly(
            self.field,
            {exp_scale_q(e, k, q): c for e, c in self.terms.items()},
            _clean=True,
        )

    # -- division and gcd ---------------------------------------------------

    def lift(self, level: int) -> dict[int, int]:
        """Integer-exponent view at the given level (>= own level)."""
        q = self.field.q
        out = {}
        for (n, l), c in self.terms.items():
            out[n * q ** (level - l)] = c
        return out

    @classmethod
    def from_lift(cls, field, int_terms: dict[int, int], level: int) -> "PerfectPoly":
        q = field.q
        return cls(field, {exp_normalize(n, level, q): c for n, c in int_terms.items()}, _clean=True)

    def __divmod__(self, other: "PerfectPoly"):
        self._check_field(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_one() or self.is_zero():
            return self, self.field.poly_zero()
        if len(other.terms) == 1:
            return self._divmod_monomial(other)
        level = max(self.level, other.level)
        quot, rem = _divmod_int_terms(self.lift(level), other.lift(level), self.field.fq)
        return (
            PerfectPoly.from_lift(self.field, quot, level),
            PerfectPoly.from_lift(self.field, rem, level),
        )

    def _divmod_monomial(self, other: "PerfectPoly"):
        q = self.field.q
        fq = self.field.fq
        (de, dc), = other.terms.items()
        inv = fq.inv(dc)
        quot, rem = {}, {}
        for e, c in self.terms.items():
            if exp_lt(e, de, q):
                rem[e] = c
            else:
                new = exp_add(e, (-de[0], de[1]), q)
                quot[new] = fq.mul(c, inv)
        return (
            PerfectPoly(self.field, quot, _clean=True),
            PerfectPoly(self.field, rem, _clean=True),
        )

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def exact_div(self, other: "PerfectPoly") -> "PerfectPoly":
        quot, rem = divmod(self, other)
        if not rem.is_zero():
            raise ValueError("division is not exact")
        return quot

    def gcd(self, other: "PerfectPoly") -> "PerfectPoly":
        """Monic gcd at the common level."""
        self._check_field(other)
        if self.is_zero():
            return other.monic() if not other.is_zero() else other
        if other.is_zero():
            return self.monic()
        level = max(self.level, other.level)
        g = _gcd_int_terms(self.lift(level), other.lift(level), self.field.fq)
        return PerfectPoly.from_lift(self.field, g, level)

    def monic(self) -> "PerfectPoly":
        c = self.lead_coeff()
        if c in (0, 1):
            return self
        return self.scale(self.field.fq.inv(c))

    # -- misc ---------------------------------------------------------------

    def sorted_terms(self, reverse=True):
        q = self.field.q
        return sorted(self.terms.items(), key=lambda item: exp_key(item[0], q), reverse=reverse)

    def __eq__(self, other):
        return (
            isinstance(other, PerfectPoly)
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field.config, tuple(sorted(self.terms.items()))))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"PerfectPoly({poly_text(self)})"


def _divmod_int_terms(num: dict, den: dict, fq: Fq):
    """Sparse long division on integer-exponent term maps."""
    dd = max(den)
    dl_inv = fq.inv(den[dd])
    add_t, mul_t, neg_t = fq._add, fq._mul, fq._neg
    rem = dict(num)
    quot = {}
    heap = [-e for e in rem if e >= dd]
    heapq.heapify(heap)
    while heap:
        e = -heapq.heappop(heap)
        c = rem.get(e)
        if c is None or e < dd:
            continue
        qc = mul_t[c][dl_inv]
        qe = e - dd
        quot[qe] = qc
        ncq = neg_t[qc]
        row = mul_t[ncq]
        for e2, c2 in den.items():
            ee = qe + e2
            cc = row[c2]
            prev = rem.get(ee)
            if prev is None:
                rem[ee] = cc
                if ee >= dd and ee != e:
                    heapq.heappush(heap, -ee)
            else:
                s = add_t[prev][cc]
                if s:
                    rem[ee] = s
                else:
                    del rem[ee]
    return quot, {e: c for e, c in rem.items() if c}


def _gcd_int_terms(a: dict, b: dict, fq: Fq) -> dict:
    if fq.q == 2:
        x = _to_bits(a)
        y = _to_bits(b)
        while y:
            dx, dy = x.bit_length(), y.bit_length()
            if dx < dy:
                x, y = y, x
                continue
            while x.bit_length() >= dy and x:
                x ^= y << (x.bit_length() - dy)
            x, y = y, x
        return _from_bits(x)
    da = _to_dense(a, fq)
    db = _to_dense(b, fq)
    while db:
        da = _dense_mod(da, db, fq)
        da, db = db, da
    inv = fq.inv(da[-1])
    return {e: fq.mul(c, inv) for e, c in enumerate(da) if c}


def _to_bits(terms: dict) -> int:
    v = 0
    for e in terms:
        v |= 1 << e
    return v


def _from_bits(v: int) -> dict:
    out = {}
    e = 0
    while v:
        if v & 1:
            out[e] = 1
        v >>= 1
        e += 1
    return out


def _to_dense(terms: dict, fq) -> list:
    if not terms:
        return []
    out = [0] * (max(terms) + 1)
    for e, c in terms.items():
        out[e] = c
    return out


def _dense_mod(a: list, m: list, fq: Fq) -> list:
    a = list(a)
    dm = len(m) - 1
    inv = fq.inv(m[-1])
    add_t, mul_t, neg_t = fq._add, fq._mul, fq._neg
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            f = mul_t[c][inv]
            nf = neg_t[f]
            row = mul_t[nf]
            for j in range(dm + 1):
                mj = m[j]
                if mj:
                    a[i - dm + j] = add_t[a[i - dm + j]][row[mj]]
    del a[dm:]
    while a and a[-1] == 0:
        a.pop()
    return a


class PerfectRational:
    """Canonical fraction num/den of PerfectPoly values."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num: PerfectPoly, den: PerfectPoly, _canonical=False):
        self.field = field
        if _canonical:
            self.num, self.den = num, den
            return
        self.num, self.den = _canonicalize(num, den)

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    @property
    def level(self) -> int:
        return max(self.num.level, self.den.level)

    def _check_field(self, other):
        if self.field is not other.field and self.field != other.field:
            raise ValueError("operands live over different fields")

    # -- field operations ---------------------------------------------------

    def __add__(self, other: "PerfectRational") -> "PerfectRational":
        self._check_field(other)
        if self.den.is_one() and other.den.is_one():
            return PerfectRational(self.field, self.num + other.num, self.den, _canonical=True)
        if self.den == other.den:
            return PerfectRational(self.field, self.num + other.num, self.den)
        return PerfectRational(
            self.field, self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PerfectRational(self.field, -self.num, self.den, _canonical=True)

    def __mul__(self, other: "PerfectRational") -> "PerfectRational":
        self._check_field(other)
        if self.den.is_one() and other.den.is_one():
            return PerfectRational(self.field, self.num * other.num, self.den, _canonical=True)
        return PerfectRational(self.field, self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "PerfectRational") -> "PerfectRational":
        self._check_field(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        return PerfectRational(self.field, self.num * other.den, self.den * other.num)

    def inverse(self) -> "PerfectRational":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        num, den = self.den, self.num
        c = den.lead_coeff()
        if c != 1:
            inv = self.field.fq.inv(c)
            num, den = num.scale(inv), den.scale(inv)
        return PerfectRational(self.field, num, den, _canonical=True)

    def __pow__(self, e: int) -> "PerfectRational":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return self.field.one()
        # coprimality and monic denominator survive powering
        return PerfectRational(self.field, self.num ** e, self.den ** e, _canonical=True)

    def frobenius(self) -> "PerfectRational":
        return PerfectRational(
            self.field, self.num.frobenius(), self.den.frobenius(), _canonical=True
        )

    def qth_root(self) -> "PerfectRational":
        return PerfectRational(
            self.field, self.num.qth_root(), self.den.qth_root(), _canonical=True
        )

    def q_power(self, k: int) -> "PerfectRational":
        return PerfectRational(
            self.field, self.num.q_power(k), self.den.q_power(k), _canonical=True
        )

    def scale_fq(self, c: int) -> "PerfectRational":
        if c == 0:
            return self.field.zero()
        return PerfectRational(self.field, self.num.scale(c), self.den, _canonical=True)

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, PerfectRational)
            and self.field == other.field
            and self.num.terms == other.num.terms
            and self.den.terms == other.den.terms
        )

    def __hash__(self):
        return hash(
            (
                self.field.config,
                tuple(sorted(self.num.terms.items())),
                tuple(sorted(self.den.terms.items())),
            )
        )

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        return rational_text(self)

    def __repr__(self):
        return f"PerfectRational({rational_text(self)})"

    def to_json(self):
        return rational_to_json(self)


def _canonicalize(num: PerfectPoly, den: PerfectPoly):
    field = num.field
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return field.poly_zero(), field.poly_one()
    if den.is_one():
        return num, den
    if len(den.terms) == 1:
        return _reduce_monomial_den(num, den)
    # cheap exact-division probes cover the structured quotients that
    # dominate real workloads; full gcd is the fallback
    dn, dd = num.degree(), den.degree()
    if dn >= dd:
        quot, rem = divmod(num, den)
        if rem.is_zero():
            return quot, field.poly_one()
    if dd >= dn:
        quot2, rem2 = divmod(den, num)
        if rem2.is_zero():
            inv = field.fq.inv(quot2.lead_coeff())
            return field.poly_one().scale(inv), quot2.scale(inv)
    g = num.gcd(den)
    if not g.is_one():
        num = num.exact_div(g)
        den = den.exact_div(g)
    c = den.lead_coeff()
    if c != 1:
        inv = field.fq.inv(c)
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def _reduce_monomial_den(num: PerfectPoly, den: PerfectPoly):
    field = num.field
    q = field.q
    (de, dc), = den.terms.items()
    shift = de
    for e in num.terms:
        if exp_lt(e, shift, q):
            shift = e
    inv = field.fq.inv(dc)
    new_num = {}
    for e, c in num.terms.items():
        new_num[exp_add(e, (-shift[0], shift[1]), q)] = field.fq.mul(c, inv)
    new_den_exp = exp_add(de, (-shift[0], shift[1]), q)
    new_den = {new_den_exp: 1}
    return (
        PerfectPoly(field, new_num, _clean=True),
        PerfectPoly(field, new_den, _clean=True),
    )


class PerfectField:
    """Factory and context for scalars over F_q; q = p^nu."""

    def __init__(self, p: int, nu: int = 1):
        self.config = FieldConfig(p, nu)
        self.fq = Fq(p, nu)
        self.p = p
        self.nu = nu
        self.q = self.fq.q

    @classmethod
    def from_config(cls, config: FieldConfig) -> "PerfectField":
        return cls(config.p, config.nu)

    def __eq__(self, other):
        return isinstance(other, PerfectField) and self.config == other.config

    def __hash__(self):
        return hash(self.config)

    def __repr__(self):
        return f"PerfectField(p={self.p}, nu={self.nu})"

    # -- polynomial factories -----------------------------------------------

    def poly(self, terms: dict) -> PerfectPoly:
        return PerfectPoly(self, terms)

    def poly_zero(self) -> PerfectPoly:
        return PerfectPoly(self, {}, _clean=True)

    def poly_one(self) -> PerfectPoly:
        return PerfectPoly(self, {(0, 0): 1}, _clean=True)

    def poly_x(self, num: int = 1, level: int = 0) -> PerfectPoly:
        if num == 0:
            return self.poly_one()
        return PerfectPoly(self, {exp_normalize(num, level, self.q): 1}, _clean=True)

    # -- scalar factories ---------------------------------------------------

    def rational(self, num, den=None) -> PerfectRational:
        if isinstance(num, PerfectRational):
            return num
        if not isinstance(num, PerfectPoly):
            num = self.poly(num)
        if den is None:
            return PerfectRational(self, num, self.poly_one(), _canonical=True)
        if not isinstance(den, PerfectPoly):
            den = self.poly(den)
        return PerfectRational(self, num, den)

    def zero(self) -> PerfectRational:
        return PerfectRational(self, self.poly_zero(), self.poly_one(), _canonical=True)

    def one(self) -> PerfectRational:
        return PerfectRational(self, self.poly_one(), self.poly_one(), _canonical=True)

    def x(self) -> PerfectRational:
        return PerfectRational(self, self.poly_x(), self.poly_one(), _canonical=True)

    def constant(self, c: int) -> PerfectRational:
        """Scalar from a packed F_q element."""
        if self.nu == 1:
            c = c % self.p
        elif not 0 <= c < self.q:
            raise ValueError(f"{c} is not a packed F_{self.q} element")
        if c == 0:
            return self.zero()
        return PerfectRational(
            self, PerfectPoly(self, {(0, 0): c}, _clean=True), self.poly_one(), _canonical=True
        )

    def from_int(self, n: int) -> PerfectRational:
        return self.constant(self.fq.from_int(n))

    def minus_one(self) -> PerfectRational:
        return self.constant(self.fq.minus_one)

    def bracket(self, i: int) -> PerfectRational:
        """x^(q^i) - x, with index 0 mapped to 0."""
        if i < 0:
            raise ValueError("bracket index must be nonnegative")
        if i == 0:
            return self.zero()
        num = PerfectPoly(
            self,
            {(self.q ** i, 0): 1, (1, 0): self.fq.minus_one},
            _clean=True,
        )
        return PerfectRational(self, num, self.poly_one(), _canonical=True)

    def sign(self, k: int) -> PerfectRational:
        """(-1)^k as a scalar; collapses to 1 in characteristic 2."""
        return self.one() if k % 2 == 0 else self.minus_one()

    # -- text and JSON forms ------------------------------------------------

    def parse(self, text: str) -> PerfectRational:
        return parse_rational(self, text)

    def from_json(self, obj) -> PerfectRational:
        return rational_from_json(self, obj)


# ---------------------------------------------------------------------------
# Canonical text grammar and JSON serialization.

def poly_text(poly: PerfectPoly) -> str:
    if poly.is_zero():
        return "0"
    q = poly.field.q
    parts = []
    for (n, l), c in poly.sorted_terms():
        if n == 0:
            parts.append(str(c))
            continue
        exp = str(n) if l == 0 else f"{n}/{q ** l}"
        if c == 1:
            parts.append(f"x^({exp})")
        else:
            parts.append(f"{c}*x^({exp})")
    return " + ".join(parts)


def rational_text(r: PerfectRational) -> str:
    if r.den.is_one():
        return poly_text(r.num)
    return f"({poly_text(r.num)})/({poly_text(r.den)})"


_TERM_RE = re.compile(
    r"^\s*(?:(?P<coeff>\d+)\s*\*\s*)?x\^\(\s*(?P<num>\d+)\s*(?:/\s*(?P<qpow>\d+))?\s*\)\s*$"
)


def _parse_poly(field: PerfectField, text: str) -> PerfectPoly:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    if text.strip() == "0":
        return field.poly_zero()
    q = field.q
    terms = {}
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty term in {text!r}")
        m = _TERM_RE.match(chunk)
        if m:
            coeff = int(m.group("coeff") or 1)
            num = int(m.group("num"))
            qpow = m.group("qpow")
            level = 0
            if qpow is not None:
                value = int(qpow)
                while value > 1:
                    if value % q:
                        raise ValueError(f"exponent denominator {qpow} is not a power of q")
                    value //= q
                    level += 1
            e = exp_normalize(num, level, q)
        elif chunk.isdigit():
            coeff = int(chunk)
            e = (0, 0)
        else:
            raise ValueError(f"cannot parse term {chunk!r}")
        if not 0 <= coeff < field.q:
            raise ValueError(f"coefficient {coeff} out of range for q={field.q}")
        if e in terms:
            raise ValueError(f"duplicate exponent in {text!r}")
        if coeff:
            terms[e] = coeff
    return PerfectPoly(field, terms, _clean=True)


def parse_rational(field: PerfectField, text: str) -> PerfectRational:
    text = text.strip()
    depth = 0
    split_at = None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            split_at = i
            break
    if split_at is None:
        return field.rational(_parse_poly(field, text))
    num = _parse_poly(field, text[:split_at])
    den = _parse_poly(field, text[split_at + 1 :])
    return field.rational(num, den)


def poly_json_terms(poly: PerfectPoly, level: int):
    q = poly.field.q
    out = [[n * q ** (level - l), c] for (n, l), c in poly.terms.items()]
    out.sort(key=lambda pair: pair[0], reverse=True)
    return out


def rational_to_json(r: PerfectRational):
    level = r.level
    return {
        "level": level,
        "num": poly_json_terms(r.num, level),
        "den": poly_json_terms(r.den, level),
    }


def rational_from_json(field: PerfectField, obj) -> PerfectRational:
    level = int(obj["level"])
    num = {exp_normalize(int(n), level, field.q): int(c) for n, c in obj["num"]}
    den = {exp_normalize(int(n), level, field.q): int(c) for n, c in obj["den"]}
    return field.rational(PerfectPoly(field, num), PerfectPoly(field, den))
