"""Command-line front end: ``besselmoments {moment,verify,pslq,period}``.

Exit status is 0 on success, 1 when a verification fails, 2 for usage
errors (bad flags, unknown identities, unsupported dimensions) and 3 when
the requested accuracy or precision budget cannot be met.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import mpmath
from mpmath import mpf

from . import __version__
from .cache import MomentStore
from .context import PrecisionContext
from .errors import AccuracyError, BesselMomentsError, RelationNotFoundError
from .identities import REDISCOVERABLE, expand_ids, rediscover, verify_identity
from .kernels import MomentSpec
from .moments import VerificationRecord, attach_store, moment
from .periods import MAX_SIMPLEX_DIM, PeriodForm, Variant, period_value
from .pslq import check_budget, find_relation

log = logging.getLogger("besselmoments")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_ACCURACY = 0, 1, 2, 3
DEFAULT_DIGITS = 30


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class SuiteReport:
    tool_version: str
    timestamp: str
    records: tuple

    @classmethod
    def from_records(cls, records, timestamp=None) -> "SuiteReport":
        # records pass through their JSON form so that a written report
        # reads back equal to the one in memory
        recs = sorted((VerificationRecord.from_json(r.to_json()) for r in records),
                      key=lambda r: r.identity_id)
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(__version__, timestamp, tuple(recs))

    @property
    def summary(self) -> dict:
        passed = sum(r.passed for r in self.records)
        return {"total": len(self.records), "passed": passed, "failed": len(self.records) - passed}

    def to_json(self) -> dict:
        return {"tool_version": self.tool_version, "timestamp": self.timestamp,
                "records": [r.to_json() for r in self.records], "summary": self.summary}

    @classmethod
    def from_json(cls, data: dict) -> "SuiteReport":
        report = cls(data["tool_version"], data["timestamp"],
                     tuple(VerificationRecord.from_json(r) for r in data["records"]))
        if data.get("summary", report.summary) != report.summary:
            raise ValueError("report summary does not match its records")
        return report

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path) -> "SuiteReport":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# argument handling

def _int_at_least(lo):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v
    return parse


def _positive_real(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0 or v != v or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return text


def _nonneg_int(text):
    return _int_at_least(0)(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--digits", type=_int_at_least(10), help=f"target digits (default {DEFAULT_DIGITS})")
    common.add_argument("--jobs", type=_int_at_least(1), help="worker processes (default: logical cores)")
    common.add_argument("--cache-dir", help="moment cache directory (default: platform cache dir)")
    common.add_argument("--out", help="write a JSON result here")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the moment cache")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="besselmoments", parents=[common],
                     description="High-precision Bessel moments, identities and integer relations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moment", parents=[common], help="int u^p K0^a (u K1)^b I0^c (u I1)^d du")
    p.add_argument("--p", type=_nonneg_int, required=True)
    p.add_argument("--a", type=_nonneg_int, required=True)
    for name in ("b", "c", "d"):
        p.add_argument(f"--{name}", type=_nonneg_int, default=0)

    v = sub.add_parser("verify", parents=[common], help="check catalog identities")
    v.add_argument("--suite", nargs="+", default=["all"], help="'all' or identity ids")

    q = sub.add_parser("pslq", parents=[common], help="integer relation search")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--values", help="file of decimal strings, one per line ('#' comments)")
    src.add_argument("--rediscover", metavar="ID")
    q.add_argument("--bound", type=_int_at_least(1), help="max |coefficient| (required with --values)")

    r = sub.add_parser("period", parents=[common], help="evaluate a simplex period form")
    r.add_argument("--n", type=_int_at_least(3), required=True)
    r.add_argument("--p", type=int, choices=(1, 3), required=True)
    r.add_argument("--form", choices=[v.value for v in Variant if v is not Variant.FULL_N], required=True)
    r.add_argument("--tol", type=_positive_real, help="absolute tolerance (default 10^-digits)")
    return parser


def _defaults(args):
    for name, value in (("digits", DEFAULT_DIGITS), ("jobs", os.cpu_count() or 1), ("cache_dir", None),
                        ("out", None), ("no_cache", False), ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, value)
    return args


def _validate(args):
    """Everything that can be checked without numerics."""
    if args.command == "moment":
        try:
            MomentSpec(args.p, args.a, args.b, args.c, args.d)
        except BesselMomentsError as exc:
            raise UsageError(str(exc))
    elif args.command == "verify":
        ids = [i for item in args.suite for i in item.split(",") if i]
        try:
            args.ids = expand_ids(ids)
        except KeyError as exc:
            raise UsageError(f"unknown identity {exc.args[0]!r}")
    elif args.command == "pslq":
        if args.values is not None:
            if args.bound is None:
                raise UsageError("--values needs --bound")
            args.numbers = _read_values(args.values)
        else:
            if args.bound is not None:
                raise UsageError("--bound applies to --values only")
            if args.rediscover not in REDISCOVERABLE:
                raise UsageError(f"no rediscovery basis for {args.rediscover!r}; "
                                 f"choose from {', '.join(REDISCOVERABLE)}")
    elif args.command == "period":
        try:
            form = PeriodForm(args.n, args.p, Variant(args.form))
        except BesselMomentsError as exc:
            raise UsageError(str(exc))
        if form.dimension > MAX_SIMPLEX_DIM:
            raise UsageError(f"{form.variant.value} with n={form.n} is {form.dimension}-dimensional; "
                             f"at most {MAX_SIMPLEX_DIM} dimensions are supported")
        args.form_obj = form


def _read_values(path):
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    out = []
    for n, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            mpf(text)
        except ValueError:
            raise UsageError(f"{path}:{n}: not a decimal number: {text!r}")
        out.append(text)
    if len(out) < 2:
        raise UsageError(f"{path}: need at least two values")
    return out


def _store(args):
    if args.no_cache:
        return None
    return MomentStore(args.cache_dir)


def _emit(args, payload: dict):
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands

def cmd_moment(args) -> int:
    spec = MomentSpec(args.p, args.a, args.b, args.c, args.d)
    ctx = PrecisionContext(args.digits)
    value = moment(spec, ctx, use_cache=not args.no_cache)
    text = mpmath.nstr(value, args.digits)
    print(text)
    _emit(args, {"spec": spec.key, "digits": args.digits, "value": text})
    return EXIT_OK


def _verify_one(identity_id, digits):
    return verify_identity(identity_id, PrecisionContext(digits)).to_json()


def _init_worker(cache_dir, no_cache):
    attach_store(None if no_cache else MomentStore(cache_dir))


def cmd_verify(args) -> int:
    ids = args.ids
    start = time.perf_counter()
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=min(args.jobs, len(ids)), initializer=_init_worker,
                                 initargs=(args.cache_dir, args.no_cache)) as pool:
            futures = {i: pool.submit(_verify_one, i, args.digits) for i in ids}
            records = [VerificationRecord.from_json(futures[i].result()) for i in ids]
    else:
        records = []
        for i in ids:
            rec = verify_identity(i, PrecisionContext(args.digits))
            log.info("%s %s", i, "passed" if rec.passed else "FAILED")
            records.append(rec)
    report = SuiteReport.from_records(records)
    for rec in report.records:
        status = "PASS" if rec.passed else "FAIL"
        print(f"{status} {rec.identity_id:<18} |lhs-rhs| = {mpmath.nstr(rec.abs_diff, 3):<10} "
              f"{rec.runtime_ms} ms")
    s = report.summary
    print(f"{s['passed']}/{s['total']} passed in {time.perf_counter() - start:.1f} s")
    if args.out:
        report.write(args.out)
    return EXIT_OK if s["failed"] == 0 else EXIT_FAILED


def cmd_pslq(args) -> int:
    ctx = PrecisionContext(args.digits)
    if args.rediscover is not None:
        try:
            rel = rediscover(args.rediscover, args.digits, ctx)
        except RelationNotFoundError as exc:
            print(f"no relation found: {exc}")
            return EXIT_FAILED
        print(rel.describe())
        print("coefficients:", rel.coeffs)
        print("residual:", mpmath.nstr(rel.residual, 5), f"({rel.confidence_digits} digits of confidence)")
        if rel.expected is not None:
            print("matches known coefficients:", "yes" if rel.matches_expected else f"no, expected {rel.expected}")
        _emit(args, {"identity_id": args.rediscover, "coeffs": list(rel.coeffs),
                     "residual": mpmath.nstr(rel.residual, 6), "labels": list(rel.labels)})
        return EXIT_OK if rel.matches_expected is not False else EXIT_FAILED
    check_budget(args.digits, args.bound, len(args.numbers))
    with ctx.workdps():
        values = [mpf(t) for t in args.numbers]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rel = find_relation(values, args.bound, ctx)
    if rel is None:
        print("no relation found")
        _emit(args, {"coeffs": None})
        return EXIT_OK
    print("coefficients:", rel.coeffs)
    print("residual:", mpmath.nstr(rel.residual, 5))
    _emit(args, {"coeffs": list(rel.coeffs), "residual": mpmath.nstr(rel.residual, 6)})
    return EXIT_OK


def _period_reference(form, ctx):
    if form.variant is Variant.I0_N1:
        return moment(MomentSpec(1, form.n, 0, 1, 0), ctx)
    return moment(MomentSpec(form.p, form.n), ctx)


def cmd_period(args) -> int:
    form = args.form_obj
    ctx = PrecisionContext(args.digits)
    with ctx.workdps():
        tol = mpf(args.tol) if args.tol is not None else ctx.tolerance
        value = period_value(form, ctx, tol)
        reference = _period_reference(form, ctx)
        diff = abs(value - reference)
    shown = max(5, min(args.digits, int(-mpmath.log10(tol))))
    print(mpmath.nstr(value, shown))
    print(f"direct moment: {mpmath.nstr(reference, shown)}")
    print(f"difference: {mpmath.nstr(diff, 3)}")
    _emit(args, {"n": form.n, "p": form.p, "form": form.variant.value, "value": mpmath.nstr(value, shown),
                 "direct": mpmath.nstr(reference, shown), "difference": mpmath.nstr(diff, 6)})
    return EXIT_OK


COMMANDS = {"moment": cmd_moment, "verify": cmd_verify, "pslq": cmd_pslq, "period": cmd_period}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _defaults(parser.parse_args(argv))
        _validate(args)
    except UsageError as exc:
        print(f"besselmoments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    attach_store(_store(args))
    try:
        return COMMANDS[args.command](args)
    except AccuracyError as exc:
        print(f"besselmoments: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except BesselMomentsError as exc:
        print(f"besselmoments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        attach_store(None)
        logging.captureWarnings(False)


if __name__ == "__main__":
    sys.exit(main())
