"""Command-line front end.

Subcommands: seq, sum, check, eval, dirichlet, verify.  Exit codes:
0 success / all records pass, 1 verification failure, 2 usage or parse
error, 3 convergence precondition rejected, 4 numeric failure.  Output
formats: text (default), json (one document per invocation), csv (stable
header row).  Numeric output carries 15 significant digits plus the error
estimate so reports are self-certifying.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .catalog import CatalogError, load_catalog, run_catalog
from .dirichlet import DirichletCache, EpsUnachievableError, dirichlet_value
from .evaluator import (
    PositivityError,
    ProductRejectedError,
    ProductSpec,
    evaluate_direct,
    evaluate_product,
)
from .ratfun import ParseError, convergence_check, parse_product_term, to_rational_function
from .sequences import SequenceError, parse_seq_spec, theta_at

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_REJECTED = 3
EXIT_NUMERIC = 4


@dataclass
class CliConfig:
    tol: float = 1e-9
    cache_dir: str | None = None
    format: str = "text"
    j_max: int = 16
    n_max: int = 1_000_000


def _config_path() -> Path | None:
    env = os.environ.get("GTMPROD_CONFIG")
    if env:
        return Path(env)
    default = Path.home() / ".config" / "gtmprod" / "config.json"
    return default if default.exists() else None


def load_config() -> CliConfig:
    cfg = CliConfig()
    path = _config_path()
    if path is not None and path.exists():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            return cfg
        for key in ("tol", "cache_dir", "format", "j_max", "n_max"):
            if key in data:
                setattr(cfg, key, data[key])
    if cfg.tol <= 0:
        cfg.tol = 1e-9
    return cfg


def _num(x: float) -> str:
    return f"{x:.15g}"


def _emit(args, payload: dict, text_lines: list[str], csv_rows: list[dict]):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    elif args.format == "csv":
        if not csv_rows:
            return
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(csv_rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(csv_rows)
        sys.stdout.write(buf.getvalue())
    else:
        for line in text_lines:
            print(line)


def _make_cache(args) -> DirichletCache:
    if args.cache_dir:
        return DirichletCache(Path(args.cache_dir) / "dirichlet.cache")
    if os.environ.get("GTMPROD_CACHE_DIR"):
        return DirichletCache(Path(os.environ["GTMPROD_CACHE_DIR"]) / "dirichlet.cache")
    return DirichletCache()


def _cmd_seq(args) -> int:
    seq = parse_seq_spec(args.seq)
    if args.count < 0:
        raise SequenceError("count must be >= 0")
    if args.count > 10**7:
        raise SequenceError("count exceeds the prefix cap of 10^7")
    bits = "".join(str(theta_at(seq, n)) for n in range(args.count))
    if args.values == "sign":
        shown = " ".join("+1" if b == "0" else "-1" for b in bits)
    else:
        shown = bits
    _emit(args,
          {"command": "seq", "seq": seq.spec, "count": args.count,
           "values": args.values, "output": shown},
          [shown],
          [{"seq": seq.spec, "count": args.count, "values": args.values, "output": shown}])
    return EXIT_OK


def _cmd_sum(args) -> int:
    seq = parse_seq_spec(args.seq)
    if args.n < 0:
        raise SequenceError("n must be >= 0")
    value = seq.partial_sum(args.n)
    _emit(args,
          {"command": "sum", "seq": seq.spec, "n": args.n, "partial_sum": value},
          [str(value)],
          [{"seq": seq.spec, "n": args.n, "partial_sum": value}])
    return EXIT_OK


def _cmd_check(args) -> int:
    term = parse_product_term(args.term)
    verdict = convergence_check(to_rational_function(term), args.mode)
    payload = {"command": "check", "term": args.term, "mode": args.mode,
               "ok": verdict.ok, "reason": verdict.reason}
    rows = [{"term": args.term, "mode": args.mode, "ok": verdict.ok,
             "reason": verdict.reason or ""}]
    _emit(args, payload, ["ok" if verdict.ok else f"rejected: {verdict.reason}"], rows)
    return EXIT_OK if verdict.ok else EXIT_REJECTED


def _cmd_eval(args) -> int:
    seq = parse_seq_spec(args.seq)
    term = parse_product_term(args.term)
    spec = ProductSpec(seq, args.mode, args.start, term)
    cache = _make_cache(args)
    if args.method == "accel":
        res = evaluate_product(spec, eps=args.tol, cache=cache)
    else:
        res = evaluate_direct(spec, args.direct_n or seq.q**10, cache=cache)
    payload = {"command": "eval", "seq": seq.spec, "mode": args.mode,
               "from": args.start, "term": args.term,
               "value": res.value, "log_value": res.log_value,
               "est_error": res.est_error, "terms_used": res.terms_used,
               "dirichlet_orders": res.dirichlet_orders, "method": res.method}
    lines = [f"value     = {_num(res.value)}",
             f"log_value = {_num(res.log_value)}",
             f"est_error = {res.est_error:.3e}",
             f"terms     = {res.terms_used}",
             f"orders    = {res.dirichlet_orders}",
             f"method    = {res.method}"]
    rows = [{"seq": seq.spec, "mode": args.mode, "from": args.start,
             "term": args.term, "value": _num(res.value),
             "est_error": f"{res.est_error:.3e}",
             "terms_used": res.terms_used, "method": res.method}]
    _emit(args, payload, lines, rows)
    return EXIT_OK


def _cmd_dirichlet(args) -> int:
    seq = parse_seq_spec(args.seq)
    cache = _make_cache(args)
    value, eps = dirichlet_value(seq, args.s, eps=args.eps, cache=cache)
    payload = {"command": "dirichlet", "seq": seq.spec, "s": args.s,
               "value": value, "eps_achieved": eps}
    lines = [f"F({args.s}) = {_num(value)}", f"eps       = {eps:.3e}"]
    rows = [{"seq": seq.spec, "s": args.s, "value": _num(value),
             "eps_achieved": f"{eps:.3e}"}]
    _emit(args, payload, lines, rows)
    return EXIT_OK


def _cmd_verify(args) -> int:
    records = load_catalog(args.catalog)
    cache = _make_cache(args)
    report = run_catalog(records, filter=args.filter, tol=args.tol,
                         method=args.method, cache=cache, direct_n=args.direct_n)
    results = [{
        "id": r.id, "paper": r.paper, "method": r.method,
        "lhs_value": r.lhs_value, "rhs_value": r.rhs_value,
        "abs_dlog": r.abs_dlog, "est_error": r.est_error,
        "terms_used": r.terms_used, "pass": r.passed,
    } for r in report.results]
    payload = {"command": "verify",
               "results": results,
               "summary": {"total": report.total, "pass": report.passed,
                           "fail": report.failed}}
    lines = []
    for r in report.results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{status}  {r.id:<16} {r.method:<6} lhs={_num(r.lhs_value):<22}"
                     f" rhs={_num(r.rhs_value):<22} dlog={r.abs_dlog:.3e}"
                     f" est={r.est_error:.3e}")
        if r.reason:
            lines.append(f"      reason: {r.reason}")
    lines.append(f"summary: {report.passed}/{report.total} pass")
    rows = [{k: ("" if v is None else v) for k, v in item.items()} for item in results]
    _emit(args, payload, lines, rows)
    return EXIT_OK if report.all_passed else EXIT_VERIFY_FAIL


def build_parser(config: CliConfig) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtmprod",
        description="Generalized Thue-Morse sequences and sign-weighted "
                    "infinite products of rational terms.")
    parser.add_argument("--format", choices=("text", "json", "csv"),
                        default=config.format)
    parser.add_argument("--cache-dir", default=config.cache_dir,
                        help="directory for the Dirichlet constant cache")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seq", help="print a sequence prefix")
    p.add_argument("--seq", required=True, help="gtm:<q>:<bits> | dcount:<q>:<k> | dparity:<q>")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--values", choices=("theta", "sign"), default="theta")
    p.set_defaults(func=_cmd_seq)

    p = sub.add_parser("sum", help="partial sum of the sign sequence")
    p.add_argument("--seq", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_sum)

    p = sub.add_parser("check", help="convergence criteria for a product term")
    p.add_argument("--term", required=True)
    p.add_argument("--mode", choices=("delta", "theta"), required=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("eval", help="evaluate an infinite product")
    p.add_argument("--seq", required=True)
    p.add_argument("--mode", choices=("delta", "theta"), required=True)
    p.add_argument("--from", dest="start", type=int, default=0)
    p.add_argument("--term", required=True)
    p.add_argument("--tol", type=float, default=config.tol)
    p.add_argument("--method", choices=("accel", "direct"), default="accel")
    p.add_argument("--direct-n", type=int, default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("dirichlet", help="Dirichlet constant F(s)")
    p.add_argument("--seq", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--eps", type=float, default=1e-15)
    p.set_defaults(func=_cmd_dirichlet)

    p = sub.add_parser("verify", help="batch-verify catalog identities")
    p.add_argument("--catalog", default="builtin")
    p.add_argument("--filter", default=None, help="glob on record id or tag")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--method", choices=("accel", "direct", "both"), default="accel")
    p.add_argument("--direct-n", type=int, default=None)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    config = load_config()
    parser = build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ProductRejectedError as exc:
        print(f"rejected: {exc.reason}", file=sys.stderr)
        return EXIT_REJECTED
    except (PositivityError, EpsUnachievableError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParseError, SequenceError, CatalogError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
