"""The Carlitz operator ring in normal form.

Elements are finite sums  c * tau^l * d_s^mu * Delta_1^(i_1) ... Delta_n^(i_n)
keyed by the exponent tuple (l, mu, (i_1..i_n)); the normal form is unique,
so structural equality of the term maps is ring equality.  Multiplication
distributes and then normal-orders each word by repeatedly rewriting the
leftmost out-of-order adjacent pair with the ring relations

    tau c   = c^q tau          d_s c   = c^(1/q) d_s      Delta_j c = c Delta_j
    d_s tau = tau d_s + [1]^(1/q)
    Delta_j tau = tau Delta_j + [1] tau
    d_s Delta_j = Delta_j d_s + [1]^(1/q) d_s
    Delta_i Delta_j = Delta_j Delta_i

Each swap strictly lowers the number of inverted letter pairs and each
branch word is strictly shorter, so the rewriting terminates.
"""

from __future__ import annotations

import math
from itertools import product

from .linfun import LinFun, TruncatedSeries
from .perfect import PerfectField, PerfectRational

OpKey = tuple  # (l, mu, (i_1, ..., i_n))

_SCALAR, _TAU, _DS, _DELTA = 0, 1, 2, 3


def _rank(letter) -> int:
    kind = letter[0]
    if kind == _DELTA:
        return 3 + letter[1]
    return kind


class RingElem:
    """Normal-form element of the operator ring with n difference variables."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: PerfectField, n: int, terms: dict, _clean=False):
        self.field = field
        self.n = n
        if _clean:
            self.terms = terms
            return
        clean = {}
        for key, coeff in terms.items():
            l, mu, idx = key
            idx = tuple(idx)
            if len(idx) != n or l < 0 or mu < 0 or any(i < 0 for i in idx):
                raise ValueError(f"bad operator monomial {key}")
            if not isinstance(coeff, PerfectRational):
                coeff = field.rational(coeff)
            if coeff.is_zero():
                continue
            key = (l, mu, idx)
            prev = clean.get(key)
            if prev is not None:
                coeff = coeff + prev
            if coeff.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = coeff
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, field, n=0):
        return cls(field, n, {}, _clean=True)

    @classmethod
    def one(cls, field, n=0):
        return cls.scalar(field, field.one(), n)

    @classmethod
    def scalar(cls, field, c: PerfectRational, n=0):
        if c.is_zero():
            return cls.zero(field, n)
        return cls(field, n, {(0, 0, (0,) * n): c}, _clean=True)

    @classmethod
    def tau(cls, field, n=0):
        return cls(field, n, {(1, 0, (0,) * n): field.one()}, _clean=True)

    @classmethod
    def ds(cls, field, n=0):
        return cls(field, n, {(0, 1, (0,) * n): field.one()}, _clean=True)

    @classmethod
    def delta(cls, field, j: int, n: int):
        if not 1 <= j <= n:
            raise IndexError(f"delta index {j} out of range for n={n}")
        idx = tuple(1 if t == j - 1 else 0 for t in range(n))
        return cls(field, n, {(0, 0, idx): field.one()}, _clean=True)

    @classmethod
    def monomial(cls, field, l, mu, idx, coeff=None):
        idx = tuple(idx)
        coeff = field.one() if coeff is None else coeff
        return cls(field, len(idx), {(l, mu, idx): coeff})

    # -- structure --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Filtration degree: max of l + mu + sum(i) over the support."""
        if not self.terms:
            return -1
        return max(l + mu + sum(idx) for l, mu, idx in self.terms)

    def _check(self, other):
        if self.field != other.field or self.n != other.n:
            raise ValueError("elements live in different rings")

    # -- additive structure -------------------------------------------------------

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            prev = out.get(key)
            if prev is None:
                out[key] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
        return RingElem(self.field, self.n, out, _clean=True)

    def __neg__(self):
        return RingElem(self.field, self.n, {k: -c for k, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: PerfectRational) -> "RingElem":
        """Left multiplication by a scalar."""
        if c.is_zero():
            return RingElem.zero(self.field, self.n)
        return RingElem(self.field, self.n, {k: c * v for k, v in self.terms.items()}, _clean=True)

    # -- multiplication -------------------------------------------------------------

    def __mul__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        field, n = self.field, self.n
        out = {}
        for (l1, m1, i1), c1 in self.terms.items():
            word_left = _letters(l1, m1, i1)
            for (l2, m2, i2), c2 in other.terms.items():
                word = word_left + [(_SCALAR, c2)] + _letters(l2, m2, i2)
                for key, c in _normal_terms(field, n, word).items():
                    c = c1 * c
                    prev = out.get(key)
                    if prev is not None:
                        c = c + prev
                    if c.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = c
        return RingElem(field, n, out, _clean=True)

    # -- action on functions -----------------------------------------------------------

    def apply(self, f):
        """Apply to a LinFun or TruncatedSeries, rightmost factors first."""
        series = isinstance(f, TruncatedSeries)
        total = None
        for (l, mu, idx), coeff in self.terms.items():
            g = f
            for j, reps in enumerate(idx, start=1):
                for _ in range(reps):
                    g = g.delta(j)
            for _ in range(mu):
                g = g.ds()
            for _ in range(l):
                g = g.tau()
            g = g.scale(coeff)
            total = g if total is None else total + g
        if total is not None:
            return total
        if series:
            return TruncatedSeries(LinFun.zero(f.field, f.n), f.order, f.validity)
        return LinFun.zero(f.field, f.n)

    # -- serialization -------------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: item[0])

    def to_json(self):
        return {
            "n": self.n,
            "terms": [
                [[l, mu, list(idx)], c.to_json()] for (l, mu, idx), c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, field, obj):
        n = int(obj["n"])
        terms = {}
        for (l, mu, idx), cj in obj["terms"]:
            terms[(int(l), int(mu), tuple(int(i) for i in idx))] = field.from_json(cj)
        return cls(field, n, terms)

    def __eq__(self, other):
        return (
            isinstance(other, RingElem)
            and self.field == other.field
            and self.n == other.n
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field.config, self.n, tuple(sorted(self.terms))))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (l, mu, idx), c in self.sorted_terms():
            factors = [f"({c})"]
            if l:
                factors.append(f"T^{l}")
            if mu:
                factors.append(f"D^{mu}")
            for j, i in enumerate(idx, start=1):
                if i:
                    factors.append(f"G{j}^{i}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"RingElem(n={self.n}, {len(self.terms)} terms)"


def _letters(l: int, mu: int, idx) -> list:
    word = [(_TAU,)] * l + [(_DS,)] * mu
    for j, reps in enumerate(idx, start=1):
        word.extend([(_DELTA, j)] * reps)
    return word


def _first_disorder(word) -> int | None:
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        ra, rb = _rank(a), _rank(b)
        if ra > rb or (a[0] == _SCALAR and b[0] == _SCALAR):
            return i
    return None


def _normal_terms(field: PerfectField, n: int, word) -> dict:
    """Normal-order one word; returns OpKey -> coefficient contributions."""
    br1 = field.bracket(1)
    br1_root = br1.qth_root()
    out = {}
    stack = [word]
    while stack:
        w = stack.pop()
        i = _first_disorder(w)
        if i is None:
            key, coeff = _collapse(field, n, w)
            if not coeff.is_zero():
                prev = out.get(key)
                if prev is not None:
                    coeff = coeff + prev
                if coeff.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = coeff
            continue
        a, b = w[i], w[i + 1]
        head, tail = w[:i], w[i + 2 :]
        if b[0] == _SCALAR:
            lam = b[1]
            if a[0] == _SCALAR:
                stack.append(head + [(_SCALAR, a[1] * lam)] + tail)
            elif a[0] == _TAU:
                stack.append(head + [(_SCALAR, lam.frobenius()), a] + tail)
            elif a[0] == _DS:
                stack.append(head + [(_SCALAR, lam.qth_root()), a] + tail)
            else:
                stack.append(head + [b, a] + tail)
        elif a[0] == _DS and b[0] == _TAU:
            stack.append(head + [b, a] + tail)
            stack.append(head + [(_SCALAR, br1_root)] + tail)
        elif a[0] == _DELTA and b[0] == _TAU:
            stack.append(head + [b, a] + tail)
            stack.append(head + [(_SCALAR, br1), b] + tail)
        elif a[0] == _DELTA and b[0] == _DS:
            stack.append(head + [b, a] + tail)
            stack.append(head + [(_SCALAR, -br1_root), b] + tail)
        elif a[0] == _DELTA and b[0] == _DELTA:
            stack.append(head + [b, a] + tail)
        else:  # pragma: no cover - the rules above are exhaustive
            raise AssertionError(f"unhandled pair {a} {b}")
    return out


def _collapse(field: PerfectField, n: int, word):
    coeff = field.one()
    l = mu = 0
    idx = [0] * n
    for letter in word:
        kind = letter[0]
        if kind == _SCALAR:
            coeff = coeff * letter[1]
        elif kind == _TAU:
            l += 1
        elif kind == _DS:
            mu += 1
        else:
            idx[letter[1] - 1] += 1
    return (l, mu, tuple(idx)), coeff


def ring_mul(a: RingElem, b: RingElem) -> RingElem:
    return a * b


def ring_apply(a: RingElem, f):
    return a.apply(f)


def dim_gamma(n: int, nu: int) -> int:
    """Dimension of the degree-<=nu filtration layer, enumerated and closed."""
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    count = 0
    for tup in product(range(nu + 1), repeat=n + 2):
        if sum(tup) <= nu:
            count += 1
    closed = math.comb(nu + n + 2, n + 2)
    if count != closed:  # pragma: no cover - the two counts always agree
        raise AssertionError(f"enumeration {count} disagrees with closed form {closed}")
    return closed


def monomials_up_to(n: int, degree: int):
    """All operator exponent keys (l, mu, idx) of filtration degree <= degree."""
    out = []
    for total in range(degree + 1):
        for l in range(total + 1):
            for mu in range(total - l + 1):
                rest = total - l - mu
                if n == 0:
                    if rest == 0:
                        out.append((l, mu, ()))
                    continue
                for idx in _compositions(rest, n):
                    out.append((l, mu, idx))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def probe_independence(a: RingElem, probes: int) -> bool:
    """Witness that a normal-form element acts nontrivially.

    Sweeps probe monomials s^(q^mu') t_j^(q^(mu'+1+o_j)) for mu' and the
    offsets o_j up to the bound; the k-indices stay above mu' so d_s can
    never push a probe out of the function space.
    """
    if a.is_zero():
        raise ValueError("probe_independence requires a nonzero element")
    field, n = a.field, a.n
    for mu_p in range(probes + 1):
        for offsets in product(range(probes + 1), repeat=n):
            key = (mu_p,) + tuple(mu_p + 1 + o for o in offsets)
            probe = LinFun.monomial(field, key)
            if not a.apply(probe).is_zero():
                return True
    return False
