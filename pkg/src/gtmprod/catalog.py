"""Machine-readable identity records and the batch verification runner.

One record per line, pipe-separated and diff-friendly:

    id|source|seqspec|mode|from|lhs-product-term|rhs-expression|tags

The builtin catalog ships as package data (77+ concrete closed-form
equalities) and every record is fully validated at load time: both
mini-languages must parse and the resulting product spec must pass
``check_product``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fnmatch import fnmatch
from importlib import resources
from pathlib import Path

from .dirichlet import DirichletCache
from .evaluator import (
    EvalResult,
    ProductSpec,
    check_product,
    evaluate_direct,
    evaluate_product,
)
from .expr import eval_expr, parse_expr
from .ratfun import parse_product_term
from .sequences import parse_seq_spec


class CatalogError(ValueError):
    """Malformed or invalid catalog input, annotated with the line number."""

    def __init__(self, message: str, lineno: int | None = None):
        where = f" (line {lineno})" if lineno is not None else ""
        super().__init__(f"{message}{where}")
        self.lineno = lineno


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    paper: str
    seqspec: str
    mode: str
    start: int
    lhs: str
    rhs: str
    tags: tuple[str, ...]

    def product_spec(self) -> ProductSpec:
        return ProductSpec(parse_seq_spec(self.seqspec), self.mode, self.start,
                           parse_product_term(self.lhs))

    def rhs_value(self) -> float:
        return eval_expr(parse_expr(self.rhs))

    def to_line(self) -> str:
        return "|".join([self.id, self.paper, self.seqspec, self.mode,
                         str(self.start), self.lhs, self.rhs, ",".join(self.tags)])


def parse_catalog_line(line: str, lineno: int | None = None) -> IdentityRecord:
    parts = line.split("|")
    if len(parts) != 8:
        raise CatalogError(f"expected 8 pipe-separated fields, got {len(parts)}", lineno)
    rid, paper, seqspec, mode, start_text, lhs, rhs, tags = (p.strip() for p in parts)
    if mode not in ("delta", "theta"):
        raise CatalogError(f"bad mode {mode!r}", lineno)
    try:
        start = int(start_text)
    except ValueError:
        raise CatalogError(f"bad start index {start_text!r}", lineno) from None
    return IdentityRecord(rid, paper, seqspec, mode, start, lhs, rhs,
                          tuple(t for t in tags.split(",") if t))


def _validate(record: IdentityRecord, lineno: int | None):
    try:
        spec = record.product_spec()
        record.rhs_value()
    except Exception as exc:
        raise CatalogError(f"record {record.id!r} does not validate: {exc}", lineno) from None
    chk = check_product(spec)
    if not chk:
        raise CatalogError(f"record {record.id!r} rejected: {chk.reason}", lineno)


def builtin_catalog_text() -> str:
    return resources.files("gtmprod.data").joinpath("builtin.catalog").read_text()


def load_catalog(source: str | Path = "builtin") -> list[IdentityRecord]:
    """Load and validate records from the builtin catalog or a file path."""
    if source == "builtin":
        text = builtin_catalog_text()
    else:
        text = Path(source).read_text()
    records: list[IdentityRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        record = parse_catalog_line(line, lineno)
        if record.id in seen:
            raise CatalogError(f"duplicate record id {record.id!r}", lineno)
        _validate(record, lineno)
        seen.add(record.id)
        records.append(record)
    return records


@dataclass(frozen=True)
class RecordResult:
    id: str
    paper: str
    method: str
    passed: bool
    lhs_value: float
    rhs_value: float
    abs_dlog: float
    est_error: float
    terms_used: int
    reason: str | None = None


@dataclass(frozen=True)
class CatalogReport:
    results: tuple[RecordResult, ...]
    total: int
    passed: int
    failed: int

    @property
    def all_passed(self) -> bool:
        return self.failed == 0


def _matches(record: IdentityRecord, pattern: str | None) -> bool:
    if not pattern:
        return True
    return fnmatch(record.id, pattern) or any(fnmatch(t, pattern) for t in record.tags)


def _evaluate_record(record: IdentityRecord, method: str, tol: float,
                     cache: DirichletCache, direct_n: int | None) -> RecordResult:
    rhs = record.rhs_value()
    try:
        spec = record.product_spec()
        if method == "accel":
            res: EvalResult = evaluate_product(spec, eps=max(tol / 4.0, 1e-13), cache=cache)
        else:
            n = direct_n if direct_n is not None else spec.seq.q**10
            res = evaluate_direct(spec, n, cache=cache)
    except Exception as exc:  # failures are data in a batch run
        return RecordResult(record.id, record.paper, method, False,
                            math.nan, rhs, math.inf, math.inf, 0, str(exc))
    dlog = abs(res.log_value - math.log(rhs))
    ok = dlog <= tol + res.est_error
    return RecordResult(record.id, record.paper, method, ok, res.value, rhs,
                        dlog, res.est_error, res.terms_used)


def run_catalog(records, filter: str | None = None, tol: float = 1e-8,
                method: str = "accel", cache: DirichletCache | None = None,
                direct_n: int | None = None) -> CatalogReport:
    """Verify records whose id or tag matches the glob; report in id order."""
    if method not in ("accel", "direct", "both"):
        raise ValueError(f"method must be accel, direct or both, got {method!r}")
    if cache is None:
        cache = DirichletCache()
    methods = ("accel", "direct") if method == "both" else (method,)
    selected = sorted((r for r in records if _matches(r, filter)), key=lambda r: r.id)
    results = []
    for record in selected:
        for m in methods:
            results.append(_evaluate_record(record, m, tol, cache, direct_n))
    passed = sum(1 for r in results if r.passed)
    return CatalogReport(tuple(results), len(results), passed, len(results) - passed)
