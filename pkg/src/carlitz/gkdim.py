"""Growth of cyclic modules: filtration dimensions and Hilbert fitting.

The module generated by a function f is filtered by the images of f under
operator monomials of bounded degree.  Dimensions are exact ranks over the
coefficient field; entries of the rank matrices are restricted to the
monomial window that is still exact at each level, so truncation noise
never leaks into a dimension count.  Fitting successive finite differences
of the dimension sequence recovers the degree and leading coefficient of
the eventual polynomial growth.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product

from .field import FqExt
from .linfun import LinFun, MonomialEscape, TruncatedSeries
from .perfect import PerfectField, PerfectPoly, PerfectRational
from .ring import monomials_up_to


class NoStabilization(Exception):
    """The dimension sequence never settled on constant differences."""

    def __init__(self, dims, report=None):
        self.dims = list(dims)
        self.report = report
        super().__init__(f"no stable difference window in {self.dims}")


class VacuumPreconditionError(Exception):
    """The candidate vector fails d_s v = 0 or tau^m v != 0."""


@dataclass
class FiltrationReport:
    """Per-level dimensions plus the fitted growth data."""

    dims: list
    truncation: int
    fitted_degree: int | None = None
    fitted_multiplicity: int | None = None
    window: tuple | None = None
    classification: str | None = None
    warnings: list = dc_field(default_factory=list)

    def dims_list(self):
        return [d for _, d in self.dims]

    def to_json(self):
        return {
            "dims": [[j, d] for j, d in self.dims],
            "degree": self.fitted_degree,
            "multiplicity": self.fitted_multiplicity,
            "window": list(self.window) if self.window else None,
            "truncation": self.truncation,
            "classification": self.classification,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# Exact rank of families of F_q-linear functions.

def _columns(vectors, window):
    cols = set()
    for v in vectors:
        for key in v.terms:
            if window is None or v.n == 0 or max(key[1:]) <= window:
                cols.add(key)
    return sorted(cols)


def _rows_cleared(vectors, window) -> list[dict]:
    """Rows as sparse PerfectPoly maps, denominators cleared per column.

    Column scaling preserves rank, and entries sharing a column share
    denominator structure (operator images stack q-power divisors of a
    common product), so per-column lcms stay small where per-row lcms
    explode.
    """
    raw = []
    for v in vectors:
        entries = {}
        for key, c in v.terms.items():
            if window is None or v.n == 0 or max(key[1:]) <= window:
                entries[key] = c
        if entries:
            raw.append(entries)
    if not raw:
        return []
    col_lcm: dict = {}
    for entries in raw:
        for key, c in entries.items():
            if c.den.is_one():
                continue
            den = col_lcm.get(key)
            if den is None:
                col_lcm[key] = c.den
            else:
                g = den.gcd(c.den)
                col_lcm[key] = den * c.den.exact_div(g)
    rows = []
    for entries in raw:
        row = {}
        for key, c in entries.items():
            scale = col_lcm.get(key)
            if scale is None:
                row[key] = c.num
            elif c.den.is_one():
                row[key] = c.num * scale
            else:
                row[key] = c.num * scale.exact_div(c.den)
        rows.append(row)
    return rows


def exact_rank(vectors, window=None, mode="exact", rng=None, trials=3) -> int:
    """Rank of the span of the vectors on the windowed coordinate set."""
    vectors = [v for v in vectors if not v.is_zero()]
    if not vectors:
        return 0
    field = vectors[0].field
    if any(v.n != vectors[0].n for v in vectors):
        raise ValueError("vectors live in different function spaces")
    if mode == "probabilistic":
        rank, _ = probabilistic_rank(vectors, window, rng=rng, trials=trials)
        return rank
    if mode != "exact":
        raise ValueError(f"unknown rank mode {mode!r}")
    rows = _rows_cleared(vectors, window)
    rational_rows = [{c: field.rational(v) for c, v in r.items()} for r in rows if r]
    return _gauss_rank(field, rational_rows)


def _structural_pass(rows) -> int:
    """Take free pivots: a column with exactly one nonzero entry pins its
    row as independent, no other row changes.  Mutates rows in place."""
    rank = 0
    while True:
        col_count: dict = {}
        col_row: dict = {}
        for ri, r in enumerate(rows):
            for c in r:
                col_count[c] = col_count.get(c, 0) + 1
                col_row[c] = ri
        pinned = {col_row[c] for c, cnt in col_count.items() if cnt == 1}
        if not pinned:
            return rank
        rank += len(pinned)
        rows[:] = [r for ri, r in enumerate(rows) if ri not in pinned]


def _gauss_rank(field: PerfectField, rows) -> int:
    """Exact Gaussian elimination over the coefficient field.

    Markowitz pivoting keeps fill-in low on the mostly-triangular
    operator-image matrices; only rows carrying the pivot column are
    touched, and the structural pass between pivots strips the cheap part
    for free.
    """
    rows = [r for r in rows if r]
    rank = 0
    while rows:
        rank += _structural_pass(rows)
        if not rows:
            break
        col_count: dict = {}
        for r in rows:
            for c in r:
                col_count[c] = col_count.get(c, 0) + 1
        best = None
        for ri, r in enumerate(rows):
            for c, v in r.items():
                score = (len(r) - 1) * (col_count[c] - 1)
                size = len(v.num.terms) + len(v.den.terms)
                key = (score, size, len(r))
                if best is None or key < best[0]:
                    best = (key, ri, c)
        _, pi, pc = best
        pivot_row = rows.pop(pi)
        pivot = pivot_row[pc]
        rank += 1
        reduced = {c: v / pivot for c, v in pivot_row.items() if c != pc}
        for r in rows:
            a = r.pop(pc, None)
            if a is None:
                continue
            for c, w in reduced.items():
                v = r.get(c)
                t = -(a * w) if v is None else v - a * w
                if t.is_zero():
                    r.pop(c, None)
                else:
                    r[c] = t
        rows = [r for r in rows if r]
    return rank


def probabilistic_rank(vectors, window=None, rng=None, trials=3):
    """Evaluation-based rank with a reported failure-probability bound.

    Entries are evaluated at random nonzero points of an extension with at
    least 2^20 elements; the max rank over the trials is a lower bound
    that is exact except when every trial hits a root of some maximal
    minor, whose probability the returned Fraction bounds.
    """
    import random

    rng = rng or random.Random(0)
    vectors = [v for v in vectors if not v.is_zero()]
    if not vectors:
        return 0, Fraction(0)
    field = vectors[0].field
    rows_poly = _rows_cleared(vectors, window)
    rows_poly = [r for r in rows_poly if r]
    if not rows_poly:
        return 0, Fraction(0)
    level = 0
    for r in rows_poly:
        for v in r.values():
            level = max(level, v.level)
    ext_degree = 1
    while field.q ** ext_degree < 2 ** 20:
        ext_degree += 1
    ext = FqExt(field.fq, ext_degree)
    order = ext.size - 1
    lifted = [{c: v.lift(level) for c, v in r.items()} for r in rows_poly]
    # degree bound on any maximal minor, in the lifted variable
    row_degs = sorted((max(max(t) for t in r.values()) for r in lifted), reverse=True)
    minor_bound = sum(row_degs[: min(len(lifted), len(_columns(vectors, window)))])
    single = min(Fraction(1), Fraction(minor_bound, order))
    best = 0
    for _ in range(trials):
        theta = ext.random_nonzero(rng)
        pows = {}
        matrix = []
        for r in lifted:
            row = {}
            for c, terms in r.items():
                acc = ext.zero
                for e, coeff in terms.items():
                    r_e = e % order
                    base = pows.get(r_e)
                    if base is None:
                        base = pows[r_e] = ext.pow(theta, r_e)
                    acc = ext.add(acc, ext.mul(ext.embed(coeff), base))
                if not ext.is_zero(acc):
                    row[c] = acc
            if row:
                matrix.append(row)
        best = max(best, _ext_rank(ext, matrix))
    return best, single ** trials


def _ext_rank(ext, rows) -> int:
    rank = 0
    rows = [r for r in rows if r]
    while rows:
        pivot_row = rows.pop()
        pc = next(iter(pivot_row))
        inv = ext.inv(pivot_row[pc])
        rank += 1
        new_rows = []
        for r in rows:
            a = r.get(pc)
            if a is None:
                new_rows.append(r)
                continue
            factor = ext.mul(a, inv)
            nr = {}
            for c in set(r) | set(pivot_row):
                if c == pc:
                    continue
                v = r.get(c, ext.zero)
                w = pivot_row.get(c, ext.zero)
                t = ext.sub(v, ext.mul(factor, w))
                if not ext.is_zero(t):
                    nr[c] = t
            if nr:
                new_rows.append(nr)
        rows = new_rows
    return rank


# ---------------------------------------------------------------------------
# Filtration dimensions and Hilbert fitting.

def operator_images(f: TruncatedSeries, j_max: int, warnings=None):
    """Images of f under all operator monomials of degree <= j_max."""
    images = {(0, 0, (0,) * f.n): f}
    escaped = set()
    for key in monomials_up_to(f.n, j_max):
        if key in images or key in escaped:
            continue
        l, mu, idx = key
        if l > 0:
            parent = (l - 1, mu, idx)
            step = "tau"
        elif mu > 0:
            parent = (l, mu - 1, idx)
            step = "ds"
        else:
            j = next(t for t, i in enumerate(idx) if i > 0)
            pidx = tuple(i - 1 if t == j else i for t, i in enumerate(idx))
            parent = (l, mu, pidx)
            step = ("delta", j + 1)
        if parent in escaped:
            escaped.add(key)
            continue
        base = images[parent]
        try:
            if step == "tau":
                images[key] = base.tau()
            elif step == "ds":
                images[key] = base.ds()
            else:
                images[key] = base.delta(step[1])
        except MonomialEscape as exc:
            escaped.add(key)
            if warnings is not None:
                warnings.append(f"monomial escape at operator {key}: {exc.monomial}")
    return images


def filtration_dims(f: TruncatedSeries, j_max: int, rank_mode="exact", rng=None) -> FiltrationReport:
    """Exact dimensions of the degree filtration of the module generated by f."""
    if f.is_zero():
        raise ValueError("the filtration of the zero function is trivial")
    if j_max > f.validity - 1:
        raise ValueError(
            f"j_max = {j_max} exceeds the safe window (validity {f.validity} minus 1)"
        )
    warnings: list = []
    images = operator_images(f, j_max, warnings)
    dims = []
    for j in range(j_max + 1):
        window = f.validity - j if f.n else None
        vectors = [
            ts.body for key, ts in images.items() if key[0] + key[1] + sum(key[2]) <= j
        ]
        rank = exact_rank(vectors, window, mode=rank_mode, rng=rng)
        dims.append((j, rank))
        if f.n and window is not None:
            capacity = len(_columns(vectors, window))
            if rank == capacity and capacity > 0:
                warnings.append(
                    f"level {j}: rank saturates the {capacity}-dimensional window"
                )
    if rank_mode == "probabilistic":
        warnings.append("dimensions computed in probabilistic rank mode")
    return FiltrationReport(dims=dims, truncation=f.order, warnings=warnings)


def hilbert_fit(dims) -> tuple[int, int, tuple]:
    """Degree, multiplicity and window from successive finite differences.

    The fitted degree is the largest order whose differences are constant
    and nonzero over the final window of width >= 3 (the next differences
    vanish there automatically); the constant is the multiplicity, i.e.
    leading coefficient times degree factorial.
    """
    values = [d for d in dims]
    if len(values) < 3:
        raise NoStabilization(values)
    best = None
    level = list(values)
    for d in range(len(values)):
        if len(level) < 3:
            break
        tail = 1
        while tail < len(level) and level[-tail - 1] == level[-1]:
            tail += 1
        if tail >= 3 and level[-1] != 0:
            j_hi = len(values) - 1
            j_lo = len(values) - 1 - (tail - 1) - d
            best = (d, level[-1], (j_lo, j_hi))
        level = [b - a for a, b in zip(level, level[1:])]
    if best is None:
        raise NoStabilization(values)
    return best


def gk_dimension(f: TruncatedSeries, j_max: int, rank_mode="exact", rng=None) -> FiltrationReport:
    """Full growth report for the cyclic module generated by f."""
    report = filtration_dims(f, j_max, rank_mode=rank_mode, rng=rng)
    try:
        degree, multiplicity, window = hilbert_fit(report.dims_list())
    except NoStabilization as exc:
        exc.report = report
        raise
    report.fitted_degree = degree
    report.fitted_multiplicity = multiplicity
    report.window = window
    target = f.n + 1
    if degree == target:
        report.classification = "quasi-holonomic"
    elif degree < target:
        report.classification = "degenerate"
    else:
        report.classification = "unstable"
        report.warnings.append(
            f"fitted degree {degree} exceeds {target}; truncation artifact suspected"
        )
    return report


def module_F_dims(n: int, j: int) -> int:
    """Dimension of the polynomial filtration layer: (j+1)^n + S_n(j+1).

    S_n is summed directly over integers and the closed form is
    cross-checked against explicit monomial enumeration.
    """
    if n < 0 or j < 0:
        raise ValueError("n and j must be nonnegative")
    s_n = sum(k ** n for k in range(1, j + 1))
    closed = (j + 1) ** n + s_n
    if n == 0:
        enumerated = j + 1  # no k-indices: the monomials are s^(q^m), m <= j
    else:
        enumerated = sum(min(ks) + 1 for ks in product(range(j + 1), repeat=n))
    if enumerated != closed:  # pragma: no cover - identical by construction
        raise AssertionError(f"enumeration {enumerated} != closed form {closed}")
    return closed


# ---------------------------------------------------------------------------
# The finite-dimensional matrix module and the vacuum-vector machinery.

class MatrixModuleA1:
    """Explicit k-dimensional module: tau acts as the Frobenius on
    coordinates, d_s through a matrix whose diagonal solves
    lambda^q - lambda + [1]^(1/q) = 0 and whose off-diagonal entries are
    F_q constants."""

    def __init__(self, field: PerfectField, lambda_matrix):
        self.field = field
        self.matrix = [list(row) for row in lambda_matrix]
        k = len(self.matrix)
        if any(len(row) != k for row in self.matrix):
            raise ValueError("lambda matrix must be square")

    @property
    def k(self) -> int:
        return len(self.matrix)

    @classmethod
    def default_diagonal(cls, field: PerfectField) -> PerfectRational:
        """-x^(1/q): a root of lambda^q - lambda + [1]^(1/q) in every characteristic."""
        return -(field.x().qth_root())

    @classmethod
    def build(cls, field: PerfectField, k: int, rng=None, diagonal=None):
        diag = diagonal if diagonal is not None else cls.default_diagonal(field)
        matrix = []
        for i in range(k):
            row = []
            for j in range(k):
                if i == j:
                    row.append(diag)
                elif rng is None:
                    row.append(field.zero())
                else:
                    row.append(field.constant(rng.randrange(field.q)))
            matrix.append(row)
        return cls(field, matrix)

    def diagonal_ok(self) -> bool:
        br = self.field.bracket(1).qth_root()
        for i in range(self.k):
            lam = self.matrix[i][i]
            if not (lam ** self.field.q - lam + br).is_zero():
                return False
        return True

    def offdiag_ok(self) -> bool:
        for i in range(self.k):
            for j in range(self.k):
                if i != j:
                    c = self.matrix[i][j]
                    if not (c.is_zero() or (c.den.is_one() and c.num.terms.keys() <= {(0, 0)})):
                        return False
        return True

    def tau_vec(self, vec):
        return [c.frobenius() for c in vec]

    def ds_vec(self, vec):
        roots = [c.qth_root() for c in vec]
        out = []
        for i in range(self.k):
            acc = self.field.zero()
            for j in range(self.k):
                acc = acc + self.matrix[i][j] * roots[j]
            out.append(acc)
        return out


def random_scalar(field: PerfectField, rng, max_terms=3, max_exp=5, allow_den=True) -> PerfectRational:
    def rand_poly(nonzero=False):
        terms = {}
        for _ in range(rng.randrange(1, max_terms + 1)):
            level = rng.randrange(2)
            terms[(rng.randrange(max_exp + 1), level)] = rng.randrange(field.q)
        poly = field.poly(terms)
        if nonzero and poly.is_zero():
            return field.poly_one()
        return poly

    num = rand_poly()
    if allow_den and rng.random() < 0.4:
        return field.rational(num, rand_poly(nonzero=True))
    return field.rational(num)


def matrix_module_check(mod: MatrixModuleA1, trials: int, rng=None) -> bool:
    """d_s tau - tau d_s = [1]^(1/q) on random vectors, plus the diagonal law."""
    import random

    rng = rng or random.Random(0)
    if not mod.diagonal_ok() or not mod.offdiag_ok():
        return False
    br = mod.field.bracket(1).qth_root()
    for _ in range(trials):
        vec = [random_scalar(mod.field, rng) for _ in range(mod.k)]
        lhs = mod.ds_vec(mod.tau_vec(vec))
        rhs = mod.tau_vec(mod.ds_vec(vec))
        for i in range(mod.k):
            if lhs[i] - rhs[i] != br * vec[i]:
                return False
    return True


def vacuum_eigencheck(f: LinFun, m_max: int) -> bool:
    """Eigen-relation d_s tau^m v = [m]^(1/q) tau^(m-1) v and independence."""
    if f.is_zero():
        raise VacuumPreconditionError("vacuum vector must be nonzero")
    if not f.ds().is_zero():
        raise VacuumPreconditionError("vacuum vector must satisfy d_s v = 0")
    field = f.field
    powers = [f]
    for _ in range(m_max):
        powers.append(powers[-1].tau())
    if any(g.is_zero() for g in powers):
        raise VacuumPreconditionError("tau^m v vanished within the tested range")
    for m in range(1, m_max + 1):
        expected = powers[m - 1].scale(field.bracket(m).qth_root())
        if powers[m].ds() != expected:
            return False
    family = powers[:m_max]
    return exact_rank(family) == m_max


@dataclass
class SupportProfile:
    """Which k-tuples carry coefficients, per s-index m (finite-window heuristic)."""

    per_m: dict
    kind: str
    truncation: int

    def to_json(self):
        return {
            "per_m": {str(m): [list(k) for k in ks] for m, ks in self.per_m.items()},
            "kind": self.kind,
            "truncation": self.truncation,
        }


def support_profile(f: TruncatedSeries) -> SupportProfile:
    body = f.body
    per_m: dict = {}
    for key in sorted(body.terms):
        per_m.setdefault(key[0], []).append(tuple(key[1:]))
    if not per_m:
        kind = "empty"
    elif body.n == 0:
        kind = "triangular"
    elif all(all(k == m for k in ks) for m, tuples in per_m.items() for ks in tuples):
        kind = "diagonal-only"
    elif body.in_F_shape():
        kind = "triangular"
    else:
        kind = "mixed"
    return SupportProfile(per_m, kind, f.order)


def lemma2_rank_check(f: TruncatedSeries, lam_max: int, j_bound, rank_mode="exact", rng=None) -> bool:
    """Full rank of the family (tau d_s)^lambda Delta^j f on the safe window."""
    n = f.n
    bounds = tuple(j_bound) if isinstance(j_bound, (tuple, list)) else (j_bound,) * n
    if len(bounds) != n:
        raise ValueError("one Delta bound per variable required")
    if lam_max + max(bounds, default=0) > f.validity - 1:
        raise ValueError("bounds exceed the safe validity window")
    family = []
    for jt in product(*(range(b + 1) for b in bounds)):
        g = f
        for var, reps in enumerate(jt, start=1):
            for _ in range(reps):
                g = g.delta(var)
        for lam in range(lam_max + 1):
            if lam:
                g = g.ds().tau()
            family.append(g.body)
    expected = (lam_max + 1)
    for b in bounds:
        expected *= b + 1
    window = f.validity - lam_max
    return exact_rank(family, window, mode=rank_mode, rng=rng) == expected
