"""Arithmetic in the Galois field F_q (q = p^nu) and in its finite extensions.

Elements of F_q are packed into integers in [0, q): the base-p digits of
the integer are the coordinates with respect to the power basis of
F_p[z]/(h) for a fixed irreducible modulus h (for nu = 1 the integer is
the residue itself and no modulus is involved).  Packing keeps elements
hashable and cheap, and lets the field precompute full operation tables,
the right trade at the desk scales this library targets.

Extensions F_{q^d} (used for root-finding behind place valuations and for
randomized rank checks) keep elements as coefficient tuples over F_q and
use schoolbook polynomial arithmetic; no tables are built for them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

# Fixed published irreducible moduli (Conway polynomials) per (p, nu),
# coefficients listed constant-first.  Serialized values stay stable
# because these never change; other (p, nu) pairs fall back to the
# lexicographically smallest irreducible, which is equally deterministic.
MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}

_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Shape of the coefficient field: q = p^nu with p prime."""

    p: int
    nu: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.nu < 1:
            raise ValueError("nu must be a positive integer")
        if self.q < 2:
            raise ValueError("q must be at least 2")

    @property
    def q(self) -> int:
        return self.p ** self.nu


class Fq:
    """Operation tables for F_q with integer-packed elements."""

    def __init__(self, p: int, nu: int = 1):
        self.config = FieldConfig(p, nu)
        self.p = p
        self.nu = nu
        self.q = p ** nu
        if self.q > _TABLE_LIMIT:
            raise ValueError(
                f"q = {self.q} exceeds the table limit {_TABLE_LIMIT}; "
                "use FqExt over a smaller base field instead"
            )
        if nu == 1:
            self.modulus = None
        else:
            self.modulus = MODULI.get((p, nu)) or _smallest_irreducible_modulus(p, nu)
        self._build_tables()

    def _build_tables(self):
        p, nu, q = self.p, self.nu, self.q
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        neg = [0] * q
        for a in range(q):
            da = self.coords(a)
            neg[a] = self.encode([(-x) % p for x in da])
            for b in range(a, q):
                db = self.coords(b)
                s = self.encode([(x + y) % p for x, y in zip(da, db)])
                add[a][b] = add[b][a] = s
                m = self._mul_raw(da, db)
                mul[a][b] = mul[b][a] = m
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self._add, self._mul, self._neg, self._inv = add, mul, neg, inv

    def _mul_raw(self, da, db):
        p, nu = self.p, self.nu
        prod = [0] * (2 * nu - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        if nu > 1:
            for i in range(len(prod) - 1, nu - 1, -1):
                c = prod[i]
                if c:
                    prod[i] = 0
                    for j in range(nu):
                        prod[i - nu + j] = (prod[i - nu + j] - c * self.modulus[j]) % p
        return self.encode(prod[:nu])

    def coords(self, a: int) -> list[int]:
        """Base-p coordinate vector of a packed element."""
        out = []
        for _ in range(self.nu):
            out.append(a % self.p)
            a //= self.p
        return out

    def encode(self, coords) -> int:
        v = 0
        for c in reversed(list(coords)):
            v = v * self.p + (c % self.p)
        return v

    def elements(self):
        return range(self.q)

    def from_int(self, n: int) -> int:
        """Embed an ordinary integer through the prime subfield."""
        return n % self.p

    @property
    def minus_one(self) -> int:
        return self._neg[1]

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def div(self, a, b):
        return self._mul[a][self.inv(b)]

    def pow(self, a, k: int):
        if k < 0:
            a = self.inv(a)
            k = -k
        r = 1
        while k:
            if k & 1:
                r = self._mul[r][a]
            a = self._mul[a][a]
            k >>= 1
        return r

    def __eq__(self, other):
        return isinstance(other, Fq) and self.config == other.config

    def __hash__(self):
        return hash(self.config)

    def __repr__(self):
        return f"Fq(p={self.p}, nu={self.nu})"


# ---------------------------------------------------------------------------
# Dense univariate polynomials over an Fq instance (coefficients low-first).
# Internal machinery for modulus searches, irreducibility tests and FqExt.

def poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(fq, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            row = fq._mul[x]
            for j, y in enumerate(b):
                if y:
                    out[i + j] = fq._add[out[i + j]][row[y]]
    return poly_trim(out)


def poly_mod(fq, a, m):
    a = list(a)
    dm = len(m) - 1
    lead_inv = fq.inv(m[-1])
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            f = fq.mul(c, lead_inv)
            for j in range(dm + 1):
                a[i - dm + j] = fq.sub(a[i - dm + j], fq.mul(f, m[j]))
    del a[dm:]
    return poly_trim(a)


def poly_gcd(fq, a, b):
    a, b = poly_trim(list(a)), poly_trim(list(b))
    while b:
        a, b = b, poly_mod(fq, a, b)
    if a:
        inv = fq.inv(a[-1])
        a = [fq.mul(c, inv) for c in a]
    return a


def poly_powmod(fq, base, e, m):
    result = [1]
    base = poly_mod(fq, base, m)
    while e:
        if e & 1:
            result = poly_mod(fq, poly_mul(fq, result, base), m)
        base = poly_mod(fq, poly_mul(fq, base, base), m)
        e >>= 1
    return result


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def poly_is_irreducible(fq, g) -> bool:
    """gcd criterion against x^{q^d} - x over the given base field."""
    g = poly_trim(list(g))
    d = len(g) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    q = fq.q
    x = [0, 1]
    xqd = poly_powmod(fq, x, q ** d, g)
    if poly_trim([fq.sub(a, b) for a, b in itertools.zip_longest(xqd, x, fillvalue=0)]):
        return False
    for r in _prime_divisors(d):
        xqe = poly_powmod(fq, x, q ** (d // r), g)
        h = poly_trim([fq.sub(a, b) for a, b in itertools.zip_longest(xqe, x, fillvalue=0)])
        if len(poly_gcd(fq, h, g)) != 1:
            return False
    return True


def _smallest_irreducible_modulus(p, nu):
    fp = Fq(p, 1)
    for tail in range(p ** nu):
        cand = fp_coords(tail, p, nu) + [1]
        if poly_is_irreducible(fp, cand):
            return tuple(cand)
    raise RuntimeError("no irreducible modulus found")  # unreachable


def fp_coords(n, p, width):
    out = []
    for _ in range(width):
        out.append(n % p)
        n //= p
    return out


def smallest_irreducible_over(fq, degree):
    """Lexicographically smallest monic irreducible of the given degree."""
    for tail in range(fq.q ** degree):
        coeffs = []
        t = tail
        for _ in range(degree):
            coeffs.append(t % fq.q)
            t //= fq.q
        cand = coeffs + [1]
        if poly_is_irreducible(fq, cand):
            return tuple(cand)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class FqExt:
    """F_{q^d} as F_q[w]/(g), elements stored as length-d tuples over F_q."""

    def __init__(self, fq: Fq, degree: int, modulus=None):
        if degree < 1:
            raise ValueError("extension degree must be positive")
        self.fq = fq
        self.degree = degree
        if degree == 1:
            self.modulus = (0, 1)
        else:
            self.modulus = tuple(modulus) if modulus else smallest_irreducible_over(fq, degree)
            if not poly_is_irreducible(fq, list(self.modulus)):
                raise ValueError("modulus is not irreducible")
        self.size = fq.q ** degree
        self.zero = (0,) * degree
        self.one = self._tup([1])

    def _tup(self, coeffs):
        coeffs = list(coeffs)[: self.degree]
        coeffs += [0] * (self.degree - len(coeffs))
        return tuple(coeffs)

    def embed(self, c: int):
        return self._tup([c])

    def add(self, a, b):
        fq = self.fq
        return tuple(fq._add[x][y] for x, y in zip(a, b))

    def sub(self, a, b):
        fq = self.fq
        return tuple(fq._add[x][fq._neg[y]] for x, y in zip(a, b))

    def neg(self, a):
        fq = self.fq
        return tuple(fq._neg[x] for x in a)

    def mul(self, a, b):
        prod = poly_mul(self.fq, list(a), list(b))
        if len(prod) >= self.degree:
            prod = poly_mod(self.fq, prod, list(self.modulus))
        return self._tup(prod)

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in F_{q^d}")
        # extended Euclid in F_q[w]
        fq = self.fq
        r0, r1 = list(self.modulus), poly_trim(list(a))
        s0, s1 = [], [1]
        while r1:
            dr0, dr1 = len(r0) - 1, len(r1) - 1
            if dr0 < dr1:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            f = fq.div(r0[-1], r1[-1])
            shift = dr0 - dr1
            for j, c in enumerate(r1):
                r0[shift + j] = fq.sub(r0[shift + j], fq.mul(f, c))
            s1ext = [0] * shift + list(s1)
            s0 = s0 + [0] * (len(s1ext) - len(s0)) if len(s0) < len(s1ext) else s0
            for j, c in enumerate(s1ext):
                s0[j] = fq.sub(s0[j], fq.mul(f, c))
            poly_trim(r0)
            poly_trim(s0)
            r0, r1, s0, s1 = r1, r0, s1, s0
        lead_inv = fq.inv(r0[-1])
        return self._tup([fq.mul(c, lead_inv) for c in s0])

    def pow(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        r = self.one
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def elements(self):
        """All elements in deterministic order; only sane for small fields."""
        for tup in itertools.product(self.fq.elements(), repeat=self.degree):
            yield tup

    def random_nonzero(self, rng):
        while True:
            cand = tuple(rng.randrange(self.fq.q) for _ in range(self.degree))
            if not self.is_zero(cand):
                return cand
