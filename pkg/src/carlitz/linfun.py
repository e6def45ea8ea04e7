"""F_q-linear polynomials in s, t_1..t_n and truncated series over them.

A monomial is a tuple (m, k_1, ..., k_n): it stands for
s^(q^m) * t_1^(q^(k_1)) * ... * t_n^(q^(k_n)).  A LinFun maps monomials to
nonzero scalars.  The three operators act termwise:

  tau:      (a; m, ks) -> (a^q;  m+1, ks+1)     raises everything
  d_s:      (a; m, ks) -> ((a*[m])^(1/q); m-1, ks-1), m = 0 terms die
  delta_j:  (a; m, ks) -> (a*[k_j]; m, ks)      diagonal, kills k_j = 0

d_s is the s-difference operator followed by a global inverse Frobenius;
when a term has m >= 1 but some k_j = 0 that inverse Frobenius would
create t^(q^-1), which leaves the function space, so the operator raises
MonomialEscape instead of silently dropping data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .perfect import PerfectField, PerfectRational

Monomial = tuple  # (m, k_1, ..., k_n)


class MonomialEscape(Exception):
    """d_s would push a monomial outside the function space."""

    def __init__(self, monomial):
        self.monomial = monomial
        super().__init__(f"d_s escapes on monomial {monomial}")


class LinFun:
    """Finite F_q-linear combination of monomials s^(q^m) t_j^(q^k_j)."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: PerfectField, n: int, terms: dict, _clean=False):
        self.field = field
        self.n = n
        if _clean:
            self.terms = terms
            return
        clean = {}
        for key, coeff in terms.items():
            key = tuple(key)
            if len(key) != n + 1:
                raise ValueError(f"monomial {key} does not match n={n}")
            if any(e < 0 for e in key):
                raise ValueError(f"negative exponent index in {key}")
            if not isinstance(coeff, PerfectRational):
                coeff = field.rational(coeff)
            if not coeff.is_zero():
                prev = clean.get(key)
                coeff = coeff + prev if prev is not None else coeff
                if coeff.is_zero():
                    del clean[key]
                else:
                    clean[key] = coeff
        self.terms = clean

    @classmethod
    def zero(cls, field, n=0):
        return cls(field, n, {}, _clean=True)

    @classmethod
    def monomial(cls, field, key, coeff=None):
        key = tuple(key)
        coeff = field.one() if coeff is None else coeff
        return cls(field, len(key) - 1, {key: coeff})

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self):
        return sorted(self.terms)

    def coeff(self, key) -> PerfectRational:
        return self.terms.get(tuple(key), self.field.zero())

    def in_F_shape(self) -> bool:
        """True when every monomial satisfies m <= min(k_1..k_n)."""
        return all(self.n == 0 or key[0] <= min(key[1:]) for key in self.terms)

    def max_k(self) -> int:
        if self.n == 0 or not self.terms:
            return -1
        return max(max(key[1:]) for key in self.terms)

    def restrict(self, window: int) -> "LinFun":
        """Drop terms with any k_j above the window (no-op for n = 0)."""
        if self.n == 0:
            return self
        kept = {k: c for k, c in self.terms.items() if max(k[1:]) <= window}
        return LinFun(self.field, self.n, kept, _clean=True)

    # -- additive structure ---------------------------------------------------

    def _check(self, other):
        if self.field != other.field or self.n != other.n:
            raise ValueError("functions live in different spaces")

    def __add__(self, other: "LinFun") -> "LinFun":
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
        return LinFun(self.field, self.n, out, _clean=True)

    def __neg__(self):
        return LinFun(self.field, self.n, {k: -c for k, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: PerfectRational) -> "LinFun":
        if c.is_zero():
            return LinFun.zero(self.field, self.n)
        return LinFun(self.field, self.n, {k: v * c for k, v in self.terms.items()}, _clean=True)

    # -- the operators --------------------------------------------------------

    def tau(self) -> "LinFun":
        out = {}
        for key, c in self.terms.items():
            out[tuple(e + 1 for e in key)] = c.frobenius()
        return LinFun(self.field, self.n, out, _clean=True)

    def ds(self) -> "LinFun":
        field = self.field
        out = {}
        for key, c in self.terms.items():
            m = key[0]
            if m == 0:
                continue  # [0] = 0 annihilates the term
            if self.n and min(key[1:]) == 0:
                raise MonomialEscape(key)
            new_c = (c * field.bracket(m)).qth_root()
            out[tuple(e - 1 for e in key)] = new_c
        return LinFun(self.field, self.n, out, _clean=True)

    def delta(self, j: int) -> "LinFun":
        if not 1 <= j <= self.n:
            raise IndexError(f"delta index {j} out of range for n={self.n}")
        field = self.field
        out = {}
        for key, c in self.terms.items():
            k = key[j]
            if k == 0:
                continue  # [0] = 0
            out[key] = c * field.bracket(k)
        return LinFun(self.field, self.n, out, _clean=True)

    # -- evaluation (n = 0) ---------------------------------------------------

    def evaluate(self, value: PerfectRational) -> PerfectRational:
        if self.n != 0:
            raise ValueError("evaluation requires a single-variable function")
        total = self.field.zero()
        for (m,), c in self.terms.items():
            total = total + c * value.q_power(m)
        return total

    # -- serialization ----------------------------------------------------------

    def to_json(self):
        return {
            "n": self.n,
            "terms": [[list(key), self.terms[key].to_json()] for key in sorted(self.terms)],
        }

    @classmethod
    def from_json(cls, field: PerfectField, obj) -> "LinFun":
        terms = {tuple(key): field.from_json(cj) for key, cj in obj["terms"]}
        return cls(field, int(obj["n"]), terms)

    def __eq__(self, other):
        return (
            isinstance(other, LinFun)
            and self.field == other.field
            and self.n == other.n
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field.config, self.n, tuple(sorted(self.terms))))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        names = ["s"] + [f"t{j}" for j in range(1, self.n + 1)]
        parts = []
        for key in sorted(self.terms):
            factors = [f"{name}^q^{e}" for name, e in zip(names, key)]
            parts.append(f"({self.terms[key]}) " + " ".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"LinFun(n={self.n}, {len(self.terms)} terms)"


@dataclass(frozen=True)
class SeriesComparison:
    equal: bool
    window: int
    witness: tuple | None = None


class TruncatedSeries:
    """Finite window onto an infinite series of monomials.

    ``order`` bounds the stored k-indices; ``validity`` is the window on
    which the object still agrees with the untruncated series.  d_s eats
    one unit of validity (it consumes coefficients from one index higher);
    tau and delta_j are exact and leave it alone.
    """

    __slots__ = ("body", "order", "validity")

    def __init__(self, body: LinFun, order: int, validity: int | None = None):
        validity = order if validity is None else validity
        if validity > order:
            raise ValueError("validity cannot exceed the truncation order")
        if body.max_k() > order:
            raise ValueError("body carries monomials beyond the truncation order")
        self.body = body
        self.order = order
        self.validity = validity

    @property
    def field(self):
        return self.body.field

    @property
    def n(self):
        return self.body.n

    def is_zero(self):
        return self.body.is_zero()

    def tau(self) -> "TruncatedSeries":
        return TruncatedSeries(self.body.tau(), self.order + 1, self.validity)

    def ds(self) -> "TruncatedSeries":
        return TruncatedSeries(
            self.body.ds(), max(self.order - 1, 0), max(self.validity - 1, 0)
        )

    def delta(self, j: int) -> "TruncatedSeries":
        return TruncatedSeries(self.body.delta(j), self.order, self.validity)

    def scale(self, c: PerfectRational) -> "TruncatedSeries":
        return TruncatedSeries(self.body.scale(c), self.order, self.validity)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = min(self.order, other.order)
        validity = min(self.validity, other.validity)
        return TruncatedSeries((self.body + other.body).restrict(order), order, validity)

    def __neg__(self):
        return TruncatedSeries(-self.body, self.order, self.validity)

    def __sub__(self, other):
        return self + (-other)

    def compare(self, other: "TruncatedSeries") -> SeriesComparison:
        """Coefficientwise equality on the common validity window."""
        if self.n != other.n:
            raise ValueError("series have different variable counts")
        window = min(self.validity, other.validity)
        a = self.body.restrict(window)
        b = other.body.restrict(window)
        if a.terms == b.terms:
            return SeriesComparison(True, window)
        diff = a - b
        witness = min(diff.terms)
        return SeriesComparison(False, window, witness)

    def to_json(self):
        return {"order": self.order, "validity": self.validity, "body": self.body.to_json()}

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, validity={self.validity}, {self.body!r})"
