"""Places of F_q(x) and exact valuations at them.

A place is a monic irreducible pi in F_q[x]; the valuation v_pi counts the
order of vanishing at pi, so |r|_pi = q^(-deg(pi) * v_pi(r)).  Scalars at
level e > 0 are first raised to the q^e-th power (which lands them in
F_q(x) and fixes all coefficients), and the integer valuation is divided
back by q^e; results are exact Fractions, never floats.

Valuations of a level-0 polynomial f are computed from its local Taylor
expansion at a root theta of pi inside F_{q^delta}: v is the first j for
which sum_e c_e * C(e, j) * theta^e is nonzero (the common factor
theta^(-j) is dropped since theta != 0 for pi != x).  This runs in
O(v * #terms) small-field operations and never densifies f.  The place
x itself short-circuits to the minimal exponent.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .field import FqExt, poly_is_irreducible
from .perfect import PerfectField, PerfectPoly, PerfectRational

INFINITY = math.inf


class Place:
    """A monic irreducible polynomial of F_q[x], certified on creation."""

    __slots__ = ("field", "pi", "delta", "_ext", "_root")

    def __init__(self, field: PerfectField, pi: PerfectPoly):
        if pi.level != 0:
            raise ValueError("a place must be a level-0 polynomial")
        if not pi.is_monic():
            raise ValueError("a place must be monic")
        if not is_irreducible(field, pi):
            raise ValueError(f"{pi!r} is not irreducible over F_{field.q}")
        self.field = field
        self.pi = pi
        self.delta = int(pi.degree())
        self._ext = None
        self._root = None

    def is_x(self) -> bool:
        return self.pi.terms == {(1, 0): 1}

    def root(self):
        """A root of pi in F_{q^delta}, chosen deterministically."""
        if self._root is None:
            ext = FqExt(self.field.fq, self.delta)
            coeffs = _dense_level0(self.pi)
            for cand in ext.elements():
                acc = ext.zero
                for c in reversed(coeffs):
                    acc = ext.add(ext.mul(acc, cand), ext.embed(c))
                if ext.is_zero(acc):
                    self._ext = ext
                    self._root = cand
                    break
            else:
                raise RuntimeError("irreducible polynomial with no root in its residue field")
        return self._ext, self._root

    def __eq__(self, other):
        return isinstance(other, Place) and self.field == other.field and self.pi == other.pi

    def __hash__(self):
        return hash((self.field.config, tuple(sorted(self.pi.terms.items()))))

    def __str__(self):
        from .perfect import poly_text

        return poly_text(self.pi)

    def __repr__(self):
        return f"Place({self})"


def _dense_level0(poly: PerfectPoly) -> list[int]:
    deg = int(poly.degree())
    out = [0] * (deg + 1)
    for (n, l), c in poly.terms.items():
        out[n] = c
    return out


def is_irreducible(field: PerfectField, poly: PerfectPoly) -> bool:
    """gcd criterion against x^(q^d) - x for the divisors d of deg."""
    if poly.is_zero() or poly.level != 0:
        return False
    return poly_is_irreducible(field.fq, _dense_level0(poly))


def irreducibles(field: PerfectField, delta: int) -> list[Place]:
    """All monic irreducible polynomials of degree delta, each certified."""
    if delta < 1:
        raise ValueError("delta must be a positive integer")
    q = field.q
    out = []
    for tail in range(q ** delta):
        terms = {(delta, 0): 1}
        t = tail
        for i in range(delta):
            c = t % q
            t //= q
            if c:
                terms[(i, 0)] = c
        cand = PerfectPoly(field, terms, _clean=True)
        if is_irreducible(field, cand):
            out.append(Place(field, cand))
    return out


def _digits(n: int, p: int) -> tuple[int, ...]:
    out = []
    while n:
        out.append(n % p)
        n //= p
    return tuple(out)


def _poly_valuation_int(int_terms: dict[int, int], place: Place) -> int:
    """Order of vanishing of a level-0 polynomial (integer exponents)."""
    if not int_terms:
        raise ValueError("valuation of zero")
    if place.is_x():
        return min(int_terms)
    ext, theta = place.root()
    p = place.field.p
    fq = place.field.fq
    comb_mod = [[math.comb(n, k) % p if k <= n else 0 for k in range(p)] for n in range(p)]
    order = ext.size - 1
    # per-term data: base-p digits of the exponent, and c * theta^e
    prepared = []
    for e, c in int_terms.items():
        prepared.append((_digits(e, p), ext.mul(ext.embed(c), ext.pow(theta, e % order))))
    max_e = max(int_terms)
    for j in range(max_e + 1):
        jd = _digits(j, p)
        acc = ext.zero
        for ed, base in prepared:
            if len(jd) > len(ed):
                continue
            b = 1
            for i, kd in enumerate(jd):
                b = (b * comb_mod[ed[i]][kd]) % p
                if not b:
                    break
            if b:
                acc = ext.add(acc, base if b == 1 else ext.mul(ext.embed(fq.from_int(b)), base))
        if not ext.is_zero(acc):
            return j
    raise RuntimeError("valuation exceeded the polynomial degree")  # unreachable


def valuation(r: PerfectRational, place: Place):
    """v_pi(r) as an exact Fraction; +infinity for r = 0."""
    if r.field != place.field:
        raise ValueError("scalar and place live over different fields")
    if r.is_zero():
        return INFINITY
    level = r.level
    v_num = _poly_valuation_int(r.num.lift(level), place)
    v_den = _poly_valuation_int(r.den.lift(level), place)
    return Fraction(v_num - v_den, place.field.q ** level)
