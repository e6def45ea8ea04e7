"""Carlitz factorials and polynomials, K-binomial coefficients, and the
hypergeometric and generating-series machinery built from them.

Everything here is exact.  The factorial towers follow

    D_0 = 1,  D_i = [i] * D_{i-1}^q        (brackets [i] = x^(q^i) - x)
    L_0 = 1,  L_i = [i] * L_{i-1}

and the K-binomial coefficient is D_k / (D_m * D_{k-m}^(q^m)), reduced by
exact division (it always is a polynomial, which the place sweep below
witnesses).  The Carlitz polynomials come in two normalizations: e_k from
the product recursion e_k = e_{k-1}^q - D_{k-1}^(q-1) e_{k-1}, and
f_k = e_k / D_k with the explicit coefficient sum; the cache holds both
and they are cross-checked in the test suite.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .linfun import LinFun, TruncatedSeries
from .perfect import PerfectField, PerfectRational
from .places import Place, irreducibles, valuation


class CarlitzCache:
    """Append-only memo tables for D_i, L_i, e_i, f_i and K-binomials."""

    def __init__(self, field: PerfectField):
        self.field = field
        self._lock = threading.Lock()
        self._D = {0: field.one()}
        self._L = {0: field.one()}
        self._e = {0: LinFun.monomial(field, (0,))}
        self._f = {0: LinFun.monomial(field, (0,))}
        self._binom = {}

    def D(self, i: int) -> PerfectRational:
        if i < 0:
            raise ValueError("factorial index must be nonnegative")
        with self._lock:
            top = max(self._D)
            while top < i:
                top += 1
                self._D[top] = self.field.bracket(top) * self._D[top - 1].q_power(1)
            return self._D[i]

    def L(self, i: int) -> PerfectRational:
        if i < 0:
            raise ValueError("factorial index must be nonnegative")
        with self._lock:
            top = max(self._L)
            while top < i:
                top += 1
                self._L[top] = self.field.bracket(top) * self._L[top - 1]
            return self._L[i]

    def e(self, k: int) -> LinFun:
        if k < 0:
            raise ValueError("index must be nonnegative")
        with self._lock:
            top = max(self._e)
        while top < k:
            top += 1
            prev = self._e[top - 1]
            scale = self.D(top - 1) ** (self.field.q - 1)
            nxt = prev.tau() - prev.scale(scale)
            with self._lock:
                self._e[top] = nxt
        return self._e[k]

    def f(self, k: int) -> LinFun:
        if k < 0:
            raise ValueError("index must be nonnegative")
        with self._lock:
            if k in self._f:
                return self._f[k]
        field = self.field
        terms = {}
        for i in range(k + 1):
            den = self.D(i) * self.L(k - i).q_power(i)
            terms[(i,)] = field.sign(k - i) * den.inverse()
        fk = LinFun(field, 0, terms)
        with self._lock:
            self._f[k] = fk
        return fk

    def binom(self, k: int, m: int) -> PerfectRational:
        if m < 0 or m > k:
            return self.field.zero()
        with self._lock:
            hit = self._binom.get((k, m))
        if hit is not None:
            return hit
        value = self.D(k) / (self.D(m) * self.D(k - m).q_power(m))
        with self._lock:
            self._binom[(k, m)] = value
        return value


_CACHES: dict = {}
_CACHES_LOCK = threading.Lock()


def cache_for(field: PerfectField) -> CarlitzCache:
    with _CACHES_LOCK:
        cache = _CACHES.get(field.config)
        if cache is None:
            cache = _CACHES[field.config] = CarlitzCache(field)
        return cache


def dfac(field: PerfectField, i: int) -> PerfectRational:
    """Carlitz factorial D_i."""
    return cache_for(field).D(i)


def lfac(field: PerfectField, i: int) -> PerfectRational:
    """Downward factorial L_i = [i][i-1]...[1]."""
    return cache_for(field).L(i)


def carlitz_e(field: PerfectField, k: int) -> LinFun:
    return cache_for(field).e(k)


def carlitz_f(field: PerfectField, k: int) -> LinFun:
    return cache_for(field).f(k)


def binomK(field: PerfectField, k: int, m: int) -> PerfectRational:
    """K-binomial coefficient D_k / (D_m D_{k-m}^(q^m)); 0 out of range."""
    return cache_for(field).binom(k, m)


def pascal_check(field: PerfectField, k: int, m: int) -> bool:
    """binom(k,m) = binom(k-1,m-1)^q + binom(k-1,m)^q * D_m^(q-1)."""
    if not 0 <= m <= k:
        raise ValueError("need 0 <= m <= k")
    cache = cache_for(field)
    lhs = cache.binom(k, m)
    rhs = cache.binom(k - 1, m - 1).q_power(1)
    right = cache.binom(k - 1, m)
    if not right.is_zero():
        rhs = rhs + right.q_power(1) * cache.D(m) ** (field.q - 1)
    return lhs == rhs


@dataclass
class VandermondeTable:
    """Triangular coefficient table c_{l,i} for the Vandermonde expansion."""

    field: PerfectField
    m: int
    entries: dict = dc_field(default_factory=dict)

    def c(self, l: int, i: int) -> PerfectRational:
        if i < 0 or i > l:
            return self.field.zero()
        return self.entries[(l, i)]

    def recurrence_holds(self) -> bool:
        cache = cache_for(self.field)
        q = self.field.q
        for l in range(self.m):
            for i in range(l + 2):
                expect = self.c(l, i - 1) + self.c(l, i) * cache.D(self.m - i) ** (q - 1)
                if self.c(l + 1, i) != expect:
                    return False
        return True


def vandermonde_table(field: PerfectField, m: int) -> VandermondeTable:
    if m < 0:
        raise ValueError("m must be nonnegative")
    cache = cache_for(field)
    q = field.q
    table = VandermondeTable(field, m)
    table.entries[(0, 0)] = field.one()
    for l in range(m):
        for i in range(l + 2):
            left = table.entries.get((l, i - 1), field.zero())
            right = table.entries.get((l, i), field.zero())
            table.entries[(l + 1, i)] = left + right * cache.D(m - i) ** (q - 1)
    return table


def vandermonde_check(field: PerfectField, k: int, m: int, l: int) -> bool:
    """binom(k,m) = sum_i c_{l,i} binom(k-l, m-i)^(q^l)."""
    if not 0 <= l <= m <= k:
        raise ValueError("need 0 <= l <= m <= k")
    cache = cache_for(field)
    table = vandermonde_table(field, m)
    total = field.zero()
    for i in range(l + 1):
        b = cache.binom(k - l, m - i)
        if not b.is_zero():
            total = total + table.c(l, i) * b.q_power(l)
    return total == cache.binom(k, m)


def kbinom_identity_check(
    field: PerfectField, k: int, s_val: PerfectRational, t_val: PerfectRational
) -> bool:
    """e_k(st) = sum_m binom(k,m) e_m(s) e_{k-m}(t)^(q^m), pointwise."""
    cache = cache_for(field)
    lhs = cache.e(k).evaluate(s_val * t_val)
    rhs = field.zero()
    for m in range(k + 1):
        term = cache.binom(k, m) * cache.e(m).evaluate(s_val)
        rhs = rhs + term * cache.e(k - m).evaluate(t_val).q_power(m)
    return lhs == rhs


def pochhammer_neg(field: PerfectField, a: int, m: int) -> PerfectRational:
    """(-a)_m = (-1)^(a-m) L_{a-m}^(-q^m) for m <= a, else 0."""
    if a < 0 or m < 0:
        raise ValueError("parameters must be nonnegative")
    if m > a:
        return field.zero()
    cache = cache_for(field)
    return field.sign(a - m) * cache.L(a - m).q_power(m).inverse()


def thakur_hyp(field: PerfectField, a_list, b_list, truncation: int | None = None) -> LinFun:
    """Polynomial hypergeometric sum over m of prod (-a_i)_m / (prod (-b_j)_m D_m) z^(q^m).

    Summation stops where the terms stop making sense: at the minimum of
    all parameters (and the optional truncation cap).
    """
    a_list = list(a_list)
    b_list = list(b_list)
    bounds = a_list + b_list + ([truncation] if truncation is not None else [])
    if not bounds:
        raise ValueError("unbounded sum: give at least one parameter or a truncation")
    m_max = min(bounds)
    cache = cache_for(field)
    terms = {}
    for m in range(m_max + 1):
        num = field.one()
        for a in a_list:
            num = num * pochhammer_neg(field, a, m)
        den = cache.D(m)
        for b in b_list:
            den = den * pochhammer_neg(field, b, m)
        terms[(m,)] = num / den
    return LinFun(field, 0, terms)


def carlitz_module_trunc(field: PerfectField, T: int) -> TruncatedSeries:
    """Truncation of C_s(t) = sum_k f_k(s) t^(q^k); fixed point of d_s."""
    if T < 0:
        raise ValueError("truncation order must be nonnegative")
    cache = cache_for(field)
    terms = {}
    for k in range(T + 1):
        for (i,), c in cache.f(k).terms.items():
            terms[(i, k)] = c
    return TruncatedSeries(LinFun(field, 1, terms, _clean=True), T, T)


def genfun_binom(field: PerfectField, T: int) -> TruncatedSeries:
    """Truncation of sum_{m <= k} binom(k,m) s^(q^m) t^(q^k)."""
    if T < 0:
        raise ValueError("truncation order must be nonnegative")
    cache = cache_for(field)
    terms = {}
    for k in range(T + 1):
        for m in range(k + 1):
            terms[(m, k)] = cache.binom(k, m)
    return TruncatedSeries(LinFun(field, 1, terms, _clean=True), T, T)


_SUPPORTED_HYP_SHAPES = {(1, 0), (0, 1), (1, 1)}


def genfun_hyp(field: PerfectField, l: int, lam: int, T: int) -> TruncatedSeries:
    """Generating series of hypergeometric polynomials over all index tuples."""
    if (l, lam) not in _SUPPORTED_HYP_SHAPES:
        raise ValueError(f"(l, lambda) = {(l, lam)} not supported; choose from {_SUPPORTED_HYP_SHAPES}")
    n = l + lam
    terms = {}
    for idx in itertools.product(range(T + 1), repeat=n):
        poly = thakur_hyp(field, idx[:l], idx[l:], truncation=T)
        for (m,), c in poly.terms.items():
            terms[(m,) + idx] = c
    return TruncatedSeries(LinFun(field, n, terms, _clean=True), T, T)


def contiguous_check(field: PerfectField, a_list, b_list) -> bool:
    """d_s shifts every hypergeometric parameter down by one (or kills it).

    When every parameter is positive the derivative is the polynomial with
    all parameters decremented; as soon as one parameter is zero the
    derivative vanishes.
    """
    a_list, b_list = list(a_list), list(b_list)
    base = thakur_hyp(field, a_list, b_list)
    lhs = base.ds()
    if all(v >= 1 for v in a_list + b_list):
        rhs = thakur_hyp(field, [a - 1 for a in a_list], [b - 1 for b in b_list])
    else:
        rhs = LinFun.zero(field, 0)
    return lhs == rhs


def bracket_split_check(field: PerfectField, k: int) -> bool:
    """[k]^(1/q) = [k-1] + [1]^(1/q), the step behind the difference PDE."""
    if k < 1:
        raise ValueError("k must be at least 1")
    lhs = field.bracket(k).qth_root()
    return lhs == field.bracket(k - 1) + field.bracket(1).qth_root()


def pde_check_binom(field: PerfectField, T: int) -> bool:
    """d_s f = Delta_t f + [1]^(1/q) f on the binomial generating series."""
    if T < 2:
        raise ValueError("need T >= 2")
    if not all(bracket_split_check(field, k) for k in range(1, T + 1)):
        return False
    f = genfun_binom(field, T)
    lhs = f.ds()
    rhs = f.delta(1) + f.scale(field.bracket(1).qth_root())
    return lhs.compare(rhs).equal


@dataclass
class PlaceIntegralityReport:
    """Outcome of the valuation sweep over all small places."""

    q: int
    k_max: int
    delta_max: int
    places: list
    checks: int = 0
    violations: list = dc_field(default_factory=list)
    dm_mismatches: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.dm_mismatches

    def to_json(self):
        return {
            "q": self.q,
            "k_max": self.k_max,
            "delta_max": self.delta_max,
            "places": [str(p) for p in self.places],
            "checks": self.checks,
            "violations": [[str(p), k, m, str(v)] for p, k, m, v in self.violations],
            "dm_mismatches": [
                [str(p), m, str(got), str(want)] for p, m, got, want in self.dm_mismatches
            ],
            "ok": self.ok,
        }


def closed_form_dfac_valuation(q: int, delta: int, m: int) -> int:
    """v_pi(D_m) = q^i (q^(j*delta) - 1)/(q^delta - 1) with m = j*delta + i."""
    j, i = divmod(m, delta)
    return q ** i * (q ** (j * delta) - 1) // (q ** delta - 1)


def place_integrality_sweep(field: PerfectField, k_max: int, delta_max: int) -> PlaceIntegralityReport:
    """Check v_pi(binom(k,m)) >= 0 everywhere and the D_m valuation formula."""
    if k_max < 1 or delta_max < 1:
        raise ValueError("bounds must be at least 1")
    cache = cache_for(field)
    places = []
    for d in range(1, delta_max + 1):
        places.extend(irreducibles(field, d))
    report = PlaceIntegralityReport(field.q, k_max, delta_max, places)
    for place in places:
        for m in range(k_max + 1):
            got = valuation(cache.D(m), place)
            want = Fraction(closed_form_dfac_valuation(field.q, place.delta, m))
            report.checks += 1
            if got != want:
                report.dm_mismatches.append((place, m, got, want))
        for k in range(k_max + 1):
            for m in range(k + 1):
                v = valuation(cache.binom(k, m), place)
                report.checks += 1
                if v < 0:
                    report.violations.append((place, k, m, v))
    return report
