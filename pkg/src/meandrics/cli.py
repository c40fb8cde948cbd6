"""Command-line front end.

Subcommands:

- ``enumerate {nc,interval,kr-interval,rainbow} N`` streams partitions as
  JSON lines plus a trailing count line;
- ``polynomial CLASS RANGE`` prints loop-count tables (csv or json);
- ``series {thin,shallow-top,semi} ORDER`` dumps a generating series;
- ``verify SUITE`` runs oracle-equivalence checks, printing one
  PASS/FAIL line per check;
- ``simulate MODEL N L`` runs the random-matrix estimators over a list
  of dimensions.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 resource limit exceeded.  All output is deterministic given the
arguments (and seed); warnings go to stderr so stdout stays stable.
The MEANDER_THREADS environment variable caps enumeration worker
threads.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import matrix_models, meanders, partitions, transforms, verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

ENUM_BUDGETS = {"nc": 14, "interval": 16, "kr-interval": 16, "rainbow": 4096}


def _parse_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    n = int(text)
    return n, n


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def cmd_enumerate(args: argparse.Namespace) -> int:
    n = args.n
    budget = args.budget_override if args.budget_override else ENUM_BUDGETS[args.kind]
    if args.budget_override:
        print(f"warning: budget override {args.budget_override}", file=sys.stderr)
    if n < 1:
        print(f"error: n must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if n > budget:
        print(f"error: n={n} exceeds enumeration budget {budget}", file=sys.stderr)
        return EXIT_RESOURCE
    out, close = _open_out(args.out)
    try:
        count = 0
        if args.kind == "nc":
            stream = partitions.enumerate_nc(n)
        elif args.kind == "interval":
            stream = partitions.enumerate_interval(n)
        elif args.kind == "kr-interval":
            stream = (q.to_partition() for q in partitions.enumerate_kr_interval(n))
        else:
            stream = iter([meanders.rainbow(n)])
        for part in stream:
            out.write(json.dumps(partitions.partition_to_json(part)) + "\n")
            count += 1
        out.write(json.dumps({"count": count}) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_polynomial(args: argparse.Namespace) -> int:
    lo, hi = _parse_range(args.range)
    klass = meanders.MeanderClass.from_tag(args.klass)
    if args.budget_override:
        print(f"warning: budget override {args.budget_override}", file=sys.stderr)
    out, close = _open_out(args.out)
    try:
        polys = []
        for n in range(lo, hi + 1):
            try:
                polys.append(meanders.meander_polynomial(
                    klass, n, budget=args.budget_override))
            except meanders.ResourceLimitError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_RESOURCE
        if args.format == "json":
            for poly in polys:
                out.write(json.dumps(poly.to_json()) + "\n")
        else:
            out.write("n,k,count\n")
            for poly in polys:
                for n, k, count in poly.csv_rows():
                    out.write(f"{n},{k},{count}\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_series(args: argparse.Namespace) -> int:
    order = args.order
    if order < 1:
        print("error: order must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.which == "thin":
        series = transforms.thin_series(order)[0]
    elif args.which == "shallow-top":
        series = transforms.shallow_top_series(order)[0]
    else:
        series = transforms.semi_meander_series(order)
    out, close = _open_out(args.out)
    try:
        doc = {"series": args.which, "order": order,
               "coefficients": transforms.series_to_json(series)}
        out.write(json.dumps(doc, indent=1) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.budget_override:
        print(f"warning: budget override {args.budget_override}", file=sys.stderr)
    results = verify.run_suite(args.suite, budget=args.budget_override)
    failures = 0
    for name, ok, detail in results:
        tag = "PASS" if ok else "FAIL"
        print(f"{tag} {name} -- {detail}")
        failures += 0 if ok else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        model = matrix_models.Model.from_tag(args.model)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        d_values = [int(x) for x in args.d.split(",")] if args.d else [8]
    except ValueError:
        print(f"error: bad --d list {args.d!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = matrix_models.ModelSpec(
            model, args.n, args.l, d=max(d_values, default=8),
            samples=args.samples, seed=args.seed,
            second_map=args.second_map)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        reports = matrix_models.estimate_sweep(spec, d_values)
    except meanders.ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            out.write("model,n,l,d,samples,seed,mean,stderr,exact_target\n")
            for r in reports:
                doc = r.to_json()
                out.write(",".join(str(doc[k]) for k in
                                   ("model", "n", "l", "d", "samples", "seed",
                                    "mean", "stderr", "exact_target")) + "\n")
        else:
            for r in reports:
                out.write(json.dumps(r.to_json()) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meandrics",
        description="Enumeration, generating series and matrix models for "
                    "meandric systems with one shallow side.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="stream partitions as JSON lines")
    p.add_argument("kind", choices=["nc", "interval", "kr-interval", "rainbow"])
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--budget-override", type=int, default=None)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("polynomial", help="loop-count tables per class")
    p.add_argument("klass", metavar="class",
                   choices=[c.value for c in meanders.MeanderClass])
    p.add_argument("range", help="single n or lo..hi")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--budget-override", type=int, default=None)
    p.set_defaults(fn=cmd_polynomial)

    p = sub.add_parser("series", help="dump a generating series as JSON")
    p.add_argument("which", choices=["thin", "shallow-top", "semi"])
    p.add_argument("order", type=int)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_series)

    p = sub.add_parser("verify", help="run oracle-equivalence suites")
    p.add_argument("suite", choices=sorted(verify.SUITES) + ["all"])
    p.add_argument("--budget-override", type=int, default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("simulate", help="random-matrix estimates vs exact counts")
    p.add_argument("model", choices=[m.value for m in matrix_models.Model])
    p.add_argument("n", type=int)
    p.add_argument("l", type=int)
    p.add_argument("--d", default="8", help="comma-separated dimensions")
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--second-map", choices=["independent", "same", "conjugate"],
                   default="independent")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
