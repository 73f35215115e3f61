"""Command-line interface: ``randpart {count,sample,exact-cdf,verify,asym,diag}``.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 exact limit
exceeded, 4 sampler failure, 5 saddle-point solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import shlex
import sys

import numpy as np

from . import asymptotics, exact, laws, sampler
from .partitions import partition_count, partition_counts

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_EXACT_LIMIT, EXIT_SAMPLER, EXIT_SOLVER = range(6)

# t-grid used for the exact paths, t = 0.2, 0.4, ..., 5.0
T_GRID = [round(0.2 * i, 10) for i in range(1, 26)]
LOG_SUPPORT = (0.05, 0.95)

THRESHOLDS = {
    "2": {"ks": 0.02, "exact_sup": 0.10},
    "3": {"ks": 0.02, "exact_sup": 0.05},
    "1": {"ks": 0.10},
    "mult1": {"pmf": 0.01},
    "mult2": {"pmf": 0.01},
    "mult3": {"ks": 0.10},
}
EXACT_VERIFY_LIMIT = {"2": exact.SIGMA1_LIMIT, "3": 20000}


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _write_csv(out, invocation, rows, header):
    buf = io.StringIO()
    buf.write(f"# {invocation}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[h]) for h in header])
    out.write(buf.getvalue())


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


# -- commands -------------------------------------------------------------------


def cmd_count(args, out, invocation):
    if args.upto:
        table = partition_counts(args.n)
        _write_csv(out, invocation, [{"n": i, "p": p} for i, p in enumerate(table)], ["n", "p"])
    else:
        out.write(f"{partition_count(args.n)}\n")
    return EXIT_PASS


def cmd_sample(args, out, invocation):
    summary = sampler.run_experiment(args.n, args.proc, args.samples, args.seed,
                                     workers=args.workers, method=args.method)
    out.write(summary.to_json(sort_keys=True) + "\n")
    if args.ecdf:
        with open(args.ecdf, "w") as fh:
            rows = [{"t": t, "F": f} for t, f in summary.ecdf_rows()]
            _write_csv(fh, invocation, rows, ["t", "F"])
    return EXIT_PASS


def cmd_exact_cdf(args, out, invocation):
    n, proc = args.n, args.proc
    rows = []
    if args.s is not None:
        points = [(s, None) for s in args.s]
    else:
        points = [(exact.threshold_for(n, proc, t), t) for t in args.grid]
    for s, t in points:
        if t is None:
            if proc == 3:
                t = 2 * math.log(s) / math.log(n) if s >= 1 and n > 1 else 0.0
            else:
                t = math.pi * s / math.sqrt(6 * n)
        value = exact.exact_cdf(n, proc, s, limit=args.limit)
        lim = exact.limit_cdf(proc, t)
        rows.append({"t": float(t), "s": int(s) if s >= 1 else 0, "exact": str(value),
                     "exact_float": value.value, "limit": float(lim),
                     "error": abs(value.value - float(lim))})
    _write_csv(out, invocation, rows, ["t", "s", "exact", "exact_float", "limit", "error"])
    return EXIT_PASS


def _law_for(theorem, n):
    kinds = {"1": laws.LawKind.SIGMA3, "2": laws.LawKind.SIGMA1, "3": laws.LawKind.SIGMA2,
             "mult1": laws.LawKind.MULT1, "mult2": laws.LawKind.MULT2, "mult3": laws.LawKind.MULT3}
    return laws.LimitLaw(kinds[theorem], n)


PROC_FOR = {"1": 3, "2": 1, "3": 2, "mult1": 1, "mult2": 2, "mult3": 3}


def verify_report(theorem, n, samples, seed, workers=None, method="auto", exact_mode="auto",
                  summary=None) -> dict:
    """Monte Carlo (and, when cheap, exact) check of one limit law; returns the JSON report."""
    law = _law_for(theorem, n)
    proc = sampler.Procedure(PROC_FOR[theorem])
    thresholds = THRESHOLDS[theorem]
    if summary is None:
        summary = sampler.run_experiment(n, proc, samples, seed, workers=workers, method=method)
    report = {
        "theorem": theorem,
        "law": law.kind.value,
        "procedure": proc.label,
        "n": n,
        "samples": samples,
        "seed": seed,
        "method": summary.method,
        "rejection_stats": {"trials": summary.rejection_stats.trials,
                            "accepts": summary.rejection_stats.accepts},
        "checks": [],
    }
    checks = report["checks"]
    if law.discrete:
        vals, cnts = summary.mult_table()
        pmf = dict(zip(vals.tolist(), (cnts / summary.N).tolist()))
        devs = {str(m): abs(pmf.get(m, 0.0) - law.pmf(m)) for m in (1, 2, 3)}
        worst = max(devs.values())
        checks.append({"name": "pmf_deviation", "m": [1, 2, 3], "empirical": [pmf.get(m, 0.0) for m in (1, 2, 3)],
                       "limit": [law.pmf(m) for m in (1, 2, 3)], "value": worst,
                       "threshold": thresholds["pmf"], "pass": worst <= thresholds["pmf"]})
    else:
        if law.kind is laws.LawKind.MULT3:
            vals, cnts = summary.mult_table()
        else:
            vals, cnts = summary.size_table()
        t = law.normalize(vals)
        support = LOG_SUPPORT if law.kind in (laws.LawKind.SIGMA3, laws.LawKind.MULT3) else None
        ks = laws.ks_distance(t, law.cdf, weights=cnts, support=support)
        checks.append({"name": "ks", "support": list(support) if support else None, "value": ks,
                       "threshold": thresholds["ks"], "pass": ks <= thresholds["ks"]})
    limit = EXACT_VERIFY_LIMIT.get(theorem)
    use_exact = exact_mode == "on" or (exact_mode == "auto" and limit is not None and n <= limit)
    if use_exact and theorem in EXACT_VERIFY_LIMIT:
        rows = exact.cdf_grid(n, proc, T_GRID)
        sup = max(r["abs_error"] for r in rows)
        checks.append({"name": "exact_sup", "t_grid": T_GRID, "value": sup,
                       "threshold": thresholds["exact_sup"], "pass": sup <= thresholds["exact_sup"]})
    report["pass"] = all(c["pass"] for c in checks)
    return report


def cmd_verify(args, out, invocation):
    report = verify_report(args.theorem, args.n, args.samples, args.seed, workers=args.workers,
                           method=args.method, exact_mode=args.exact)
    report["invocation"] = invocation
    out.write(json.dumps(report, sort_keys=True) + "\n")
    return EXIT_PASS if report["pass"] else EXIT_FAIL


ASYM_HEADER = ["n", "d_n", "first_order", "residual", "b_val", "log_g", "hayman_log", "hr_log",
               "exact_log_p", "hayman_ratio", "hr_ratio"]


def cmd_asym(args, out, invocation):
    rows = [asymptotics.asymptotic_row(n, exact_limit=args.exact_limit) for n in args.n]
    _write_csv(out, invocation, rows, ASYM_HEADER)
    return EXIT_PASS


def cmd_diag(args, out, invocation):
    if args.locality:
        rows = asymptotics.locality_diagnostic(args.n, omega=args.omega)
        _write_csv(out, invocation, rows, list(rows[0].keys()))
    elif args.concentration:
        freq = sampler.concentration_diagnostic(args.n, args.samples, args.eps, args.seed,
                                                workers=args.workers, method=args.method)
        out.write(json.dumps({"n": args.n, "samples": args.samples, "eps": args.eps,
                              "seed": args.seed, "frequency": freq}, sort_keys=True) + "\n")
    else:
        res = sampler.acceptance_rate(args.n, args.samples, args.seed)
        out.write(json.dumps(res, sort_keys=True) + "\n")
    return EXIT_PASS


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randpart", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact partition numbers p(n)")
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.add_argument("--upto", action="store_true", help="print the table p(0..n) as CSV")
    p.set_defaults(func=cmd_count)

    def add_mc(p, samples_required=True):
        p.add_argument("--samples", type=_positive_int, required=samples_required)
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument("--workers", type=_positive_int, default=None,
                       help=f"worker processes (default ${sampler.WORKERS_ENV} or 1)")
        p.add_argument("--method", choices=sampler.METHODS, default="auto")

    p = sub.add_parser("sample", help="Monte Carlo draws of a selected part")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--proc", type=int, choices=(1, 2, 3), required=True)
    add_mc(p)
    p.add_argument("--ecdf", metavar="PATH", help="also write the normalized ECDF as CSV")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("exact-cdf", help="exact CDF of the selected part size on a grid")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--proc", type=int, choices=(1, 2, 3), required=True)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--grid", type=_float_list, help="normalized levels t1,t2,...")
    grid.add_argument("--s", type=_float_list, help="raw thresholds s1,s2,...")
    p.add_argument("--limit", type=_positive_int, default=None, help="override the exact DP limit")
    p.set_defaults(func=cmd_exact_cdf)

    p = sub.add_parser("verify", help="check a limit law; JSON report")
    p.add_argument("--theorem", choices=("1", "2", "3", "mult1", "mult2", "mult3"), required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    add_mc(p)
    p.add_argument("--exact", choices=("auto", "on", "off"), default="auto")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("asym", help="saddle-point / Hayman / Hardy-Ramanujan row(s)")
    p.add_argument("--n", type=_positive_int, nargs="+", required=True)
    p.add_argument("--exact-limit", type=_positive_int, default=50000)
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("diag", help="diagnostics")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--locality", action="store_true")
    which.add_argument("--concentration", action="store_true")
    which.add_argument("--acceptance", action="store_true", help="plain rejection acceptance rate")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--omega", type=float, default=10.0)
    p.add_argument("--eps", type=float, default=0.2)
    add_mc(p, samples_required=False)
    p.set_defaults(func=cmd_diag, samples=None)
    return parser


def main(argv=None, out=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if args.command == "diag" and not args.locality and args.samples is None:
        args.samples = 10000 if args.concentration else 100000
    invocation = shlex.join(["randpart", *argv])
    try:
        return args.func(args, out, invocation)
    except exact.ExactLimitError as exc:
        print(f"randpart: {exc}", file=sys.stderr)
        return EXIT_EXACT_LIMIT
    except sampler.SamplerError as exc:
        print(f"randpart: sampler failure: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except asymptotics.SolverError as exc:
        print(f"randpart: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"randpart: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
