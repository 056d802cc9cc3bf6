"""Command line entry point: ``markedrot analyze | series | construct``.

Exit codes: 0 ok, 2 parse error, 3 non-minimal permutations,
4 undecided comparison or depth exceeded, 5 budget exceeded,
1 infeasible construction schedule.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

from . import classify, language, rigidity
from .config import emit_spec, parse_config
from .errors import BudgetExceeded, ConfigError, DepthExceeded, NotMinimal, ScheduleInfeasible, Undecided
from .exactnum import PartialQuotients

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_MINIMAL = 3
EXIT_UNDECIDED = 4
EXIT_BUDGET = 5
EXIT_INFEASIBLE = 1


def _down(x: Fraction) -> str:
    f = float(x)
    if Fraction(f) > x:
        f = math.nextafter(f, -math.inf)
    return repr(f)


def _up(x: Fraction) -> str:
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return repr(f)


def _range(text: str | None, default: tuple[int, int]) -> range:
    if not text:
        return range(default[0], default[1] + 1)
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi) + 1)


def _load(path: str):
    with open(path, encoding="utf-8") as fh:
        doc = parse_config(fh.read())
    return doc.to_spec()


def _opt(spec, args, name: str, default: int) -> int:
    v = getattr(args, name, None)
    if v is not None:
        return v
    return int(spec.options.get(name, default))


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    spec = _load(args.config)
    N = _opt(spec, args, "depth", 200)
    M = _opt(spec, args, "M", 6)
    v = classify.verdict(spec, N, M)
    lr = v.lr
    report = {
        "verdict": v.value.value,
        "tag": v.tag,
        "caveat": v.caveat,
        "witness": v.witness,
        "linear_recurrence": {
            "status": lr.status.value,
            "violated": list(lr.violated),
            "maxima": lr.report.maxima(),
        } if lr else None,
    }
    print(f"verdict: {v.value.value} ({v.tag}, {v.caveat} N={N}, M={M})")
    if lr:
        print(f"linear recurrence: {lr.status.value}")
        for k, val in lr.report.maxima().items():
            print(f"  max run [{k}]: {val}")
        for b in lr.violated:
            print(f"  violated: {b}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
    return EXIT_OK


def cmd_series(args) -> int:
    spec = _load(args.config)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.what == "ne":
        rng = _range(args.range, (1, 100))
        w.writerow(["n", "ne_lo", "ne_hi"])
        for n, lo, hi in language.ne_series(spec, "marked", rng.stop - 1):
            if n in rng:
                w.writerow([n, _down(lo), _up(hi)])
    elif args.what == "probe":
        rng = _range(args.range, (2, 10))
        qs = [spec.pq.q(n) for n in rng]
        samples = _opt(spec, args, "samples", 100)
        seed = _opt(spec, args, "seed", 0)
        N = args.N if args.N is not None else int(spec.options.get("N", 10000))
        w.writerow(["q", "mean", "max", "resamples"])
        for r in rigidity.probe_series(spec, qs, N, samples, seed):
            w.writerow([r.q, repr(r.mean), repr(r.max), r.resamples])
    else:
        rng = _range(args.range, (2, 12))
        budget = _opt(spec, args, "budget", 10**6)
        seed = _opt(spec, args, "seed", 0)
        w.writerow(["n", "q", "theta", "zeta", "dev_lo", "dev_hi", "epsilon", "exact"])
        for n in rng:
            pc = rigidity.psi_constancy(spec, n, budget=budget, seed=seed)
            eps = "" if pc.epsilon is None else repr(pc.epsilon)
            w.writerow([n, pc.q, pc.theta.to_dsl(), pc.theta.order(), _down(pc.deviation[0]),
                        _up(pc.deviation[1]), eps, int(pc.exact)])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _alpha(args) -> PartialQuotients:
    if args.rational:
        return PartialQuotients.from_rational(Fraction(args.rational))
    period = [int(x) for x in args.period.split(",")]
    prefix = [int(x) for x in args.prefix.split(",")] if args.prefix else []
    return PartialQuotients.periodic(period, prefix)


def cmd_construct(args) -> int:
    pq = _alpha(args)
    if args.which == "rigid3":
        spec = rigidity.rigid3_spec(pq, args.length)
    elif args.which == "nrnlr":
        r1, r2 = rigidity.construct_nrnlr_pair(pq, args.M, depth=args.length)
        spec = rigidity.nrnlr_spec(pq, r1, r2)
    else:
        rules = rigidity.construct_d2r4(pq, args.M, depth=args.length)
        spec = rigidity.d2r4_spec(pq, rules)
    spec.options.setdefault("M", str(args.M))
    spec.options.setdefault("depth", str(min(args.length, 200)))
    _write(emit_spec(spec), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="markedrot", description="Rigidity analysis of marked-point rotation extensions.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="classify a system and print the verdict")
    a.add_argument("config")
    a.add_argument("--depth", type=int)
    a.add_argument("--M", type=int)
    a.add_argument("--out", help="write a JSON report here")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("series", help="emit a CSV series")
    s.add_argument("config")
    s.add_argument("--what", choices=("ne", "probe", "psi"), required=True)
    s.add_argument("--range", help="lo:hi, inclusive (n for ne and psi, levels of q_n for probe)")
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--N", type=int, help="trajectory length for probes")
    s.add_argument("--budget", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_series)

    c = sub.add_parser("construct", help="emit a config for one of the constructions")
    c.add_argument("which", choices=("rigid3", "nrnlr", "d2r4"))
    c.add_argument("--period", default="1", help="period of the partial quotients, comma separated")
    c.add_argument("--prefix", default="", help="preperiod of the partial quotients")
    c.add_argument("--rational", help="rational approximation p/q instead of a period")
    c.add_argument("--M", type=int, default=6)
    c.add_argument("--length", type=int, default=300, help="number of explicit digits")
    c.add_argument("--seed", type=int, help="accepted for uniformity; the constructions are deterministic")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotMinimal as exc:
        print(f"not minimal: {exc}", file=sys.stderr)
        return EXIT_NOT_MINIMAL
    except (Undecided, DepthExceeded) as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ScheduleInfeasible as exc:
        print(f"schedule infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
