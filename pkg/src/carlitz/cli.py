"""Command-line interface: compute objects, verify identities, run growth
experiments, and emit tables.

Exit codes: 0 pass, 1 usage/internal error, 2 unstable dimension fit,
3 verification failure.  Output is byte-identical for identical
configuration and seed; every verify subcommand accepts --perturb as a
negative control that must fail.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .gkdim import NoStabilization, gk_dimension
from .linfun import LinFun, TruncatedSeries
from .perfect import PerfectField
from .places import irreducibles, valuation
from .ring import RingElem, probe_independence
from .special import (
    binomK,
    carlitz_e,
    carlitz_f,
    carlitz_module_trunc,
    contiguous_check,
    dfac,
    genfun_binom,
    genfun_hyp,
    kbinom_identity_check,
    lfac,
    pascal_check,
    pde_check_binom,
    place_integrality_sweep,
    thakur_hyp,
    vandermonde_check,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSTABLE = 2
EXIT_VERIFY_FAILED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="field characteristic (prime)")
    common.add_argument("--nu", type=int, default=1, help="extension degree; q = p^nu")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    common.add_argument("--rank-mode", choices=("exact", "probabilistic"), default="exact")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    return common


def build_parser() -> _Parser:
    common = _common_flags()
    parser = _Parser(prog="carlitz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", parents=[common], help="print one object")
    p_compute.add_argument(
        "what", choices=("factorial", "lfac", "bracket", "binomK", "carlitz", "hyp")
    )
    p_compute.add_argument("--i", type=int, default=None)
    p_compute.add_argument("--k", type=int, default=None)
    p_compute.add_argument("--m", type=int, default=None)
    p_compute.add_argument("--kind", choices=("e", "f"), default="f")
    p_compute.add_argument("--a", default="", help="comma list of upper parameters")
    p_compute.add_argument("--b", default="", help="comma list of lower parameters")
    p_compute.add_argument("--T", type=int, default=None)
    p_compute.set_defaults(func=cmd_compute)

    p_verify = sub.add_parser("verify", parents=[common], help="verification sweeps")
    p_verify.add_argument(
        "which",
        choices=("pascal", "vandermonde", "kbinom", "pde", "contiguous", "places", "ring"),
    )
    p_verify.add_argument("--kmax", type=int, default=8)
    p_verify.add_argument("--dmax", type=int, default=3)
    p_verify.add_argument("--T", type=int, default=8)
    p_verify.add_argument("--count", type=int, default=20)
    p_verify.add_argument("--param-max", type=int, default=4)
    p_verify.add_argument("--perturb", action="store_true", help="negative control")
    p_verify.set_defaults(func=cmd_verify)

    p_gk = sub.add_parser("gkdim", parents=[common], help="growth experiments")
    p_gk.add_argument("--function", choices=("carlitz", "binom", "hyp", "diag", "poly"), required=True)
    p_gk.add_argument("--T", type=int, default=10)
    p_gk.add_argument("--jmax", type=int, default=5)
    p_gk.add_argument("--spec", default="s^q", help="polynomial for --function poly")
    p_gk.add_argument("--l", type=int, default=1)
    p_gk.add_argument("--lam", type=int, default=0)
    p_gk.set_defaults(func=cmd_gkdim)

    p_table = sub.add_parser("table", parents=[common], help="emit value tables")
    p_table.add_argument("what", choices=("binomk", "factorials"))
    p_table.add_argument("--kmax", type=int, default=6)
    p_table.add_argument("--imax", type=int, default=6)
    p_table.add_argument("--dmax", type=int, default=2)
    p_table.set_defaults(func=cmd_table)

    return parser


def _field(args) -> PerfectField:
    return PerfectField(args.p, args.nu)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _emit_csv(args, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())


def _fraction_json(v):
    if v == float("inf"):
        return "inf"
    v = Fraction(v)
    return int(v) if v.denominator == 1 else str(v)


# ---------------------------------------------------------------------------
# compute

def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required here")


def cmd_compute(args) -> int:
    field = _field(args)
    if args.what == "factorial":
        _require(args, "i")
        value = dfac(field, args.i)
    elif args.what == "lfac":
        _require(args, "i")
        value = lfac(field, args.i)
    elif args.what == "bracket":
        _require(args, "i")
        value = field.bracket(args.i)
    elif args.what == "binomK":
        _require(args, "k", "m")
        value = binomK(field, args.k, args.m)
    elif args.what == "carlitz":
        _require(args, "k")
        fn = carlitz_e(field, args.k) if args.kind == "e" else carlitz_f(field, args.k)
        if args.format == "json":
            _emit_json(args, fn.to_json())
        else:
            _emit(args, str(fn) + "\n")
        return EXIT_OK
    else:  # hyp
        a_list = [int(v) for v in args.a.split(",") if v != ""]
        b_list = [int(v) for v in args.b.split(",") if v != ""]
        fn = thakur_hyp(field, a_list, b_list, truncation=args.T)
        if args.format == "json":
            _emit_json(args, fn.to_json())
        else:
            _emit(args, str(fn) + "\n")
        return EXIT_OK
    if args.format == "json":
        _emit_json(args, value.to_json())
    else:
        _emit(args, str(value) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def _run_checks(args, labelled_checks):
    """Evaluate (label, thunk) pairs, optionally on a thread pool.

    Results are collected in submission order, so the report does not
    depend on the worker count.
    """
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [(label, pool.submit(thunk)) for label, thunk in labelled_checks]
            return [(label, fut.result()) for label, fut in futures]
    return [(label, thunk()) for label, thunk in labelled_checks]


def cmd_verify(args) -> int:
    field = _field(args)
    rng = random.Random(args.seed)
    checks = []
    if args.which == "pascal":
        one = field.one()
        for k in range(args.kmax + 1):
            for m in range(k + 1):
                def thunk(k=k, m=m):
                    ok = pascal_check(field, k, m)
                    if args.perturb:
                        lhs = binomK(field, k, m)
                        ok = lhs == lhs + one  # tampered identity must fail
                    return ok
                checks.append((f"pascal k={k} m={m}", thunk))
    elif args.which == "vandermonde":
        one = field.one()
        for k in range(args.kmax + 1):
            for m in range(k + 1):
                for l in range(m + 1):
                    def thunk(k=k, m=m, l=l):
                        if args.perturb:
                            lhs = binomK(field, k, m)
                            return lhs == lhs + one  # tampered identity must fail
                        return vandermonde_check(field, k, m, l)
                    checks.append((f"vandermonde k={k} m={m} l={l}", thunk))
    elif args.which == "kbinom":
        for idx in range(args.count):
            s_val = _random_level0(field, rng, max_deg=3)
            t_val = _random_level0(field, rng, max_deg=3)
            for k in range(min(args.kmax, 5) + 1):
                def thunk(k=k, s_val=s_val, t_val=t_val):
                    ok = kbinom_identity_check(field, k, s_val, t_val)
                    if args.perturb:
                        lhs = carlitz_e(field, k).evaluate(s_val * t_val)
                        ok = lhs == lhs + field.one()
                    return ok
                checks.append((f"kbinom #{idx} k={k}", thunk))
    elif args.which == "pde":
        def thunk():
            if args.perturb:
                f = genfun_binom(field, args.T)
                tampered = f + TruncatedSeries(
                    LinFun.monomial(field, (0, 1)), f.order, f.validity
                )
                lhs = tampered.ds()
                rhs = tampered.delta(1) + tampered.scale(field.bracket(1).qth_root())
                return lhs.compare(rhs).equal
            return pde_check_binom(field, args.T)
        checks.append((f"pde T={args.T}", thunk))
    elif args.which == "contiguous":
        shapes = ((1, 0), (0, 1), (1, 1))
        for l, lam in shapes:
            for params in itertools.product(range(args.param_max + 1), repeat=l + lam):
                a_list, b_list = list(params[:l]), list(params[l:])
                def thunk(a_list=a_list, b_list=b_list):
                    ok = contiguous_check(field, a_list, b_list)
                    if args.perturb:
                        base = thakur_hyp(field, a_list, b_list)
                        ok = base.ds() == base.ds() + LinFun.monomial(field, (0,))
                    return ok
                checks.append((f"contiguous {a_list};{b_list}", thunk))
    elif args.which == "places":
        def thunk():
            report = place_integrality_sweep(field, args.kmax, args.dmax)
            if args.perturb:
                # threshold tamper: v >= 1 fails already at v_x(binom(0,0)) = 0
                place = irreducibles(field, 1)[0]
                return valuation(binomK(field, 0, 0), place) >= 1
            return report.ok
        checks.append((f"places kmax={args.kmax} dmax={args.dmax}", thunk))
    else:  # ring
        n = 1
        for idx in range(args.count):
            a = _random_ring_elem(field, rng, n)
            b = _random_ring_elem(field, rng, n)
            c = _random_ring_elem(field, rng, n)
            f = _random_shape_fun(field, rng, n)
            def thunk(a=a, b=b, c=c, f=f):
                assoc = (a * b) * c == a * (b * c)
                if args.perturb:
                    assoc = (a * b) * c == a * (b * c) + RingElem.one(field, n)
                compat = (a * b).apply(f) == a.apply(b.apply(f))
                return assoc and compat
            checks.append((f"ring #{idx}", thunk))
        for idx in range(args.count):
            a = _random_ring_elem(field, rng, n)
            if a.is_zero():
                continue
            checks.append((f"probe #{idx}", lambda a=a: probe_independence(a, 4)))

    results = _run_checks(args, checks)
    failures = [label for label, ok in results if not ok]
    payload = {
        "command": f"verify {args.which}",
        "q": field.q,
        "checks": len(results),
        "failures": failures,
        "ok": not failures,
    }
    if args.format == "json":
        _emit_json(args, payload)
    elif args.format == "csv":
        _emit_csv(args, ("label", "ok"), [(label, int(ok)) for label, ok in results])
    else:
        lines = [f"verify {args.which}: q={field.q} checks={len(results)}"]
        lines += [f"  FAIL {label}" for label in failures]
        lines.append("PASS" if not failures else "FAIL")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if not failures else EXIT_VERIFY_FAILED


def _random_level0(field, rng, max_deg=3):
    terms = {(e, 0): rng.randrange(field.q) for e in range(max_deg + 1)}
    value = field.rational(field.poly(terms))
    return value


def _random_ring_elem(field, rng, n, max_degree=3):
    from .ring import monomials_up_to

    keys = monomials_up_to(n, max_degree)
    terms = {}
    for _ in range(rng.randrange(1, 4)):
        key = keys[rng.randrange(len(keys))]
        coeff_poly = field.poly({(rng.randrange(4), rng.randrange(2)): rng.randrange(field.q)})
        terms[key] = field.rational(coeff_poly)
    return RingElem(field, n, terms)


def _random_shape_fun(field, rng, n, max_k=6):
    terms = {}
    for _ in range(rng.randrange(1, 5)):
        ks = tuple(rng.randrange(1, max_k + 1) for _ in range(n))
        m = rng.randrange(0, min(ks) + 1) if n else rng.randrange(0, max_k + 1)
        terms[(m,) + ks] = field.constant(rng.randrange(1, field.q))
    if not terms:
        terms[(0,) + (1,) * n] = field.one()
    return LinFun(field, n, terms)


# ---------------------------------------------------------------------------
# gkdim

def _parse_linear_poly(field, text: str) -> LinFun:
    """Parse sums like 's', 's^q', '2*s^q^3' into an n = 0 function."""
    terms = {}
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise UsageError(f"empty term in spec {text!r}")
        coeff = 1
        if "*" in chunk:
            c_txt, chunk = chunk.split("*", 1)
            coeff = int(c_txt.strip())
            chunk = chunk.strip()
        if chunk == "s":
            m = 0
        elif chunk == "s^q":
            m = 1
        elif chunk.startswith("s^q^"):
            m = int(chunk[4:])
        else:
            raise UsageError(f"cannot parse monomial {chunk!r} (use s, s^q, s^q^M)")
        key = (m,)
        prev = terms.get(key, field.zero())
        terms[key] = prev + field.from_int(coeff)
    return LinFun(field, 0, terms)


def build_experiment(field, name, T, jmax, spec="s^q", l=1, lam=0) -> TruncatedSeries:
    if name == "carlitz":
        return carlitz_module_trunc(field, T)
    if name == "binom":
        return genfun_binom(field, T)
    if name == "hyp":
        return genfun_hyp(field, l, lam, T)
    if name == "diag":
        g = carlitz_e(field, 2)
        terms = {(m, m): c for (m,), c in g.terms.items()}
        return TruncatedSeries(LinFun(field, 1, terms), T, T)
    if name == "poly":
        body = _parse_linear_poly(field, spec)
        order = jmax + 2
        return TruncatedSeries(body, order, order)
    raise UsageError(f"unknown experiment {name!r}")


def cmd_gkdim(args) -> int:
    field = _field(args)
    rng = random.Random(args.seed)
    f = build_experiment(field, args.function, args.T, args.jmax, args.spec, args.l, args.lam)
    try:
        report = gk_dimension(f, args.jmax, rank_mode=args.rank_mode, rng=rng)
    except NoStabilization as exc:
        report = exc.report
        report.classification = "unstable"
        _emit_report(args, report)
        return EXIT_UNSTABLE
    _emit_report(args, report)
    return EXIT_OK


def _emit_report(args, report) -> None:
    obj = report.to_json()
    if args.format == "json":
        _emit_json(args, obj)
    elif args.format == "csv":
        _emit_csv(args, ("j", "dim"), [(j, d) for j, d in report.dims])
    else:
        lines = [f"dims: {report.dims_list()}"]
        if report.fitted_degree is not None:
            lines.append(
                f"degree={report.fitted_degree} multiplicity={report.fitted_multiplicity} "
                f"window={report.window}"
            )
        lines.append(f"classification: {report.classification}")
        for w in report.warnings:
            lines.append(f"warning: {w}")
        _emit(args, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# table

def cmd_table(args) -> int:
    field = _field(args)
    places = []
    for d in range(1, args.dmax + 1):
        places.extend(irreducibles(field, d))
    rows = []
    if args.what == "binomk":
        for k in range(args.kmax + 1):
            for m in range(k + 1):
                value = binomK(field, k, m)
                vals = [[str(pl), _fraction_json(valuation(value, pl))] for pl in places]
                rows.append({"k": k, "m": m, "value": value.to_json(), "valuations": vals})
        csv_rows = [
            (
                row["k"],
                row["m"],
                str(binomK(field, row["k"], row["m"])),
                ";".join(f"{pl}:{v}" for pl, v in row["valuations"]),
            )
            for row in rows
        ]
        header = ("k", "m", "value", "valuations")
    else:
        for i in range(args.imax + 1):
            d_i, l_i = dfac(field, i), lfac(field, i)
            vals_d = [[str(pl), _fraction_json(valuation(d_i, pl))] for pl in places]
            rows.append({"i": i, "which": "D", "value": d_i.to_json(), "valuations": vals_d})
            vals_l = [[str(pl), _fraction_json(valuation(l_i, pl))] for pl in places]
            rows.append({"i": i, "which": "L", "value": l_i.to_json(), "valuations": vals_l})
        csv_rows = [
            (
                row["i"],
                row["which"],
                str(dfac(field, row["i"]) if row["which"] == "D" else lfac(field, row["i"])),
                ";".join(f"{pl}:{v}" for pl, v in row["valuations"]),
            )
            for row in rows
        ]
        header = ("i", "which", "value", "valuations")

    if args.format == "json":
        _emit_json(args, rows)
    elif args.format == "csv":
        _emit_csv(args, header, csv_rows)
    else:
        lines = []
        for row in rows:
            ident = f"k={row['k']} m={row['m']}" if "k" in row else f"{row['which']}_{row['i']}"
            vals = " ".join(f"{pl}:{v}" for pl, v in row["valuations"])
            lines.append(f"{ident}  {vals}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except BrokenPipeError:  # pragma: no cover
        return EXIT_USAGE
    except Exception as exc:  # internal errors also map to exit 1
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
