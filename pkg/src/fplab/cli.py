"""Command-line front door.

Subcommands: exppair, table, count, spectrum, moment4, robert-sargos,
scan, asymptotic, sawtooth, verify.  Exit codes: 0 success, 1 check or
computation failure, 2 usage error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import json
import sys
from fractions import Fraction

import numpy as np

from fplab import __version__
from fplab.analytic import asymptotic_ratio, minor_arc_scan, prime_exp_sum_grid
from fplab.counting import (
    DEFAULT_MEM_CAP,
    DENSE,
    MemoryCapError,
    TableCoverageError,
    moment4_count,
    rep_count,
    rep_spectrum,
    robert_sargos_count,
)
from fplab.exppairs import (
    TYPE_I_DEFAULT,
    TypeIConstraint,
    WordSyntaxError,
    eval_word,
    fraction_decimal,
    max_c_type_I,
    parse_word,
    search_optimal_pair,
)
from fplab.floortable import (
    FloorCertificationError,
    build_table,
    covering_limit,
    policy_from_env,
)
from fplab.verify import SUITES

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class UsageError(ValueError):
    pass


def _emit(rows: list[dict], fmt: str, path: str | None) -> None:
    """Write rows as CSV or JSON; both carry identical values."""
    out = open(path, "w") if path else sys.stdout
    try:
        if fmt == "json":
            json.dump(rows, out, indent=2, default=str)
            out.write("\n")
        else:
            if not rows:
                return
            writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    finally:
        if path:
            out.close()


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="output path (default stdout)")


def _table_for(args, n_needed: int):
    policy = policy_from_env()
    limit = args.P if getattr(args, "P", None) else covering_limit(n_needed, args.c, policy)
    table = build_table(args.c, limit, mode=getattr(args, "weights", "log-prime"), policy=policy)
    return table


def _cmd_exppair(args) -> int:
    cons = TypeIConstraint(
        h0=Fraction(args.h0), m0=Fraction(args.m0), theta=Fraction(args.theta)
    )
    if args.search:
        objective = lambda pair: -max_c_type_I(pair, cons)
        word, pair, value = search_optimal_pair(objective, args.max_len)
        c_max = -value
        print(
            f"word={word.ops or '(empty)'} kappa={pair.kappa.numerator}/{pair.kappa.denominator}"
            f" lambda={pair.lam.numerator}/{pair.lam.denominator}"
            f" c_max={c_max} (~{fraction_decimal(c_max, args.digits)})"
        )
        return EXIT_OK
    word = parse_word(args.word)
    pair = eval_word(word)
    line = (
        f"kappa={pair.kappa.numerator}/{pair.kappa.denominator}"
        f" lambda={pair.lam.numerator}/{pair.lam.denominator}"
    )
    if pair.kappa != 0:
        c_max = max_c_type_I(pair, cons)
        line += f" c_max={c_max} (~{fraction_decimal(c_max, args.digits)})"
    print(line)
    return EXIT_OK


def _cmd_table(args) -> int:
    table = build_table(args.c, args.P, mode=args.weights, policy=policy_from_env())
    if args.output and args.output.endswith(".fpt"):
        table.save(args.output)
        print(f"wrote {len(table)} entries to {args.output}")
        return EXIT_OK
    rows = [{"p": p, "v": v, "w": w} for p, v, w in table.entries]
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _parse_n_values(args) -> list[int]:
    if (args.N is None) == (args.N_range is None):
        raise UsageError("give exactly one of --N or --N-range")
    if args.N is not None:
        return [args.N]
    lo, hi, step = (int(x) for x in args.N_range.split(":"))
    return list(range(lo, hi + 1, step))


def _cmd_count(args) -> int:
    ns = _parse_n_values(args)
    table = _table_for(args, max(ns))
    rows = []
    for N in ns:
        rc = rep_count(table, N, args.s, method=args.method, mem_cap=args.mem_cap)
        rows.append(
            {
                "N": N,
                "s": args.s,
                "c": args.c,
                "unweighted": rc.unweighted,
                "weighted": rc.weighted,
                "method": rc.method,
            }
        )
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    table = _table_for(args, args.N_max)
    spec = rep_spectrum(
        table, args.s, args.N_max, mem_cap=args.mem_cap,
        unweighted=not args.weighted_only,
    )
    rows = []
    for N in range(args.N_max + 1):
        u = None if spec.unweighted is None else int(spec.unweighted[N])
        if args.nonzero and not spec.weighted[N] and not u:
            continue
        rows.append(
            {
                "N": N,
                "s": args.s,
                "c": args.c,
                "unweighted": u,
                "weighted": float(spec.weighted[N]),
                "method": DENSE,
            }
        )
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _cmd_moment4(args) -> int:
    table = None
    if args.prime_restricted:
        table = build_table(args.c, 2 * args.X, policy=policy_from_env())
    m = moment4_count(
        args.X, args.c, prime_restricted=args.prime_restricted, table=table,
        policy=policy_from_env(), mem_cap=args.mem_cap,
    )
    _emit(
        [{"X": m.X, "c": m.c, "count": m.count, "weighted": m.weighted}],
        args.format,
        args.output,
    )
    return EXIT_OK


def _cmd_robert_sargos(args) -> int:
    r = robert_sargos_count(args.Y, args.c, args.gamma)
    _emit(
        [{"Y": r.Y, "c": r.c, "gamma": r.gamma, "count": r.count}],
        args.format,
        args.output,
    )
    return EXIT_OK


def _cmd_scan(args) -> int:
    if (args.P is None) == (args.N is None):
        print("scan: give exactly one of --P or --N", file=sys.stderr)
        return EXIT_USAGE
    policy = policy_from_env()
    limit = args.P if args.P else covering_limit(args.N, args.c, policy)
    table = build_table(args.c, limit, policy=policy)
    report = minor_arc_scan(table, epsilon_cfg=args.epsilon, grid_count=args.grid)
    if args.dump_grid:
        j = np.arange(1, args.grid + 1, dtype=np.float64)
        alphas = report.tau + (0.5 - report.tau) * (j / args.grid)
        vals = prime_exp_sum_grid(table, alphas)
        rows = [
            {"alpha": a, "re": v.real, "im": v.imag, "abs": abs(v)}
            for a, v in zip(alphas.tolist(), vals.tolist())
        ]
        _emit(rows, args.format, args.dump_grid)
    _emit(
        [
            {
                "P": report.P,
                "c": report.c,
                "tau": report.tau,
                "grid_count": report.grid_count,
                "max_abs": report.max_abs,
                "argmax_alpha": report.argmax_alpha,
                "theta_exponent_observed": report.theta_exponent_observed,
            }
        ],
        args.format,
        args.output,
    )
    return EXIT_OK


def _cmd_asymptotic(args) -> int:
    Ns = np.linspace(args.N_lo, args.N_max, args.points).astype(np.int64).tolist()
    table = _table_for(args, args.N_max)
    rows = [
        {"N": N, "ratio": ratio, "weighted": weighted, "main_term": predicted}
        for N, ratio, weighted, predicted in asymptotic_ratio(
            table, Ns, args.s, mem_cap=args.mem_cap
        )
    ]
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _cmd_sawtooth(args) -> int:
    from fplab.verify import verify_sawtooth

    result = verify_sawtooth(samples=args.samples, seeds=(args.seed, args.seed + 1))
    print(result.summary())
    return EXIT_OK if result.ok else EXIT_FAIL


def _cmd_verify(args) -> int:
    suite = SUITES[args.suite]
    overrides = {}
    accepted = inspect.signature(suite).parameters
    for key in ("P", "c", "X", "grid", "seed", "samples", "epsilon", "points", "s", "gamma"):
        val = getattr(args, key, None)
        if val is not None and key in accepted:
            overrides[key] = val
    result = suite(**overrides)
    if args.format == "json":
        print(json.dumps({"name": result.name, "ok": result.ok,
                          "elapsed": result.elapsed, "details": result.details},
                         default=str, indent=2))
    else:
        print(result.summary())
    return EXIT_OK if result.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fplab",
        description="floor-power prime laboratory: exact exponent-pair calculus, "
        "certified floor-power tables, representation counting, exponential-sum scans",
    )
    parser.add_argument("--version", action="version", version=f"fplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exppair", help="evaluate or search A/B process words")
    p.add_argument("--word", default=None, help="process word, e.g. 'A^3BABABABABABAB'")
    p.add_argument("--search", action="store_true", help="search best word by c_max")
    p.add_argument("--max-len", dest="max_len", type=int, default=16)
    p.add_argument("--h0", default=str(TYPE_I_DEFAULT.h0))
    p.add_argument("--m0", default=str(TYPE_I_DEFAULT.m0))
    p.add_argument("--theta", default=str(TYPE_I_DEFAULT.theta))
    p.add_argument("--digits", type=int, default=6)
    p.set_defaults(func=_cmd_exppair)

    p = sub.add_parser("table", help="build and export a floor-power table")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--weights", default="log-prime",
                   choices=("log-prime", "von-mangoldt", "unit"))
    _add_io_flags(p)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("count", help="representation counts for given N")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--N-range", dest="N_range", default=None, help="lo:hi:step")
    p.add_argument("--P", type=int, default=None, help="prime limit override")
    p.add_argument("--weights", default="log-prime",
                   choices=("log-prime", "von-mangoldt", "unit"))
    p.add_argument("--method", default=DENSE,
                   choices=("dense-convolution", "meet-in-the-middle"))
    p.add_argument("--mem-cap", dest="mem_cap", type=int, default=DEFAULT_MEM_CAP)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("spectrum", help="counts for every N up to N-max")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N-max", dest="N_max", type=int, required=True)
    p.add_argument("--P", type=int, default=None)
    p.add_argument("--weights", default="log-prime",
                   choices=("log-prime", "von-mangoldt", "unit"))
    p.add_argument("--nonzero", action="store_true", help="emit only nonzero rows")
    p.add_argument("--weighted-only", dest="weighted_only", action="store_true",
                   help="skip exact integer counts (needed for very large N-max)")
    p.add_argument("--mem-cap", dest="mem_cap", type=int, default=DEFAULT_MEM_CAP)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("moment4", help="fourth-moment equal-sum quadruple count")
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--prime-restricted", dest="prime_restricted", action="store_true")
    p.add_argument("--mem-cap", dest="mem_cap", type=int, default=DEFAULT_MEM_CAP)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_moment4)

    p = sub.add_parser("robert-sargos", help="near-equal power-sum quadruple count")
    p.add_argument("--Y", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_robert_sargos)

    p = sub.add_parser("scan", help="minor-arc grid scan of the prime phase sum")
    p.add_argument("--P", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--grid", type=int, default=10**5)
    p.add_argument("--dump-grid", dest="dump_grid", default=None,
                   help="also write alpha,re,im,abs rows to this path")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("asymptotic", help="counts against the main-term prediction")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N-lo", dest="N_lo", type=int, default=10**5)
    p.add_argument("--N-max", dest="N_max", type=int, required=True)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--P", type=int, default=None)
    p.add_argument("--weights", default="log-prime",
                   choices=("log-prime", "von-mangoldt", "unit"))
    p.add_argument("--mem-cap", dest="mem_cap", type=int, default=DEFAULT_MEM_CAP)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_asymptotic)

    p = sub.add_parser("sawtooth", help="sample the truncated-expansion error")
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=20260810)
    p.set_defaults(func=_cmd_sawtooth)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=sorted(SUITES.keys()))
    p.add_argument("--P", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--X", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_verify)

    # accepted everywhere for config parity; computations are serial and
    # deterministic regardless
    parser.add_argument("--threads", type=int, default=1, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WordSyntaxError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MemoryCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (TableCoverageError, FloorCertificationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
