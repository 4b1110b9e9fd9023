"""Comparison tables: exact pair counts against the estimates.

Rows are plain dataclasses; :func:`render_report` turns a list of them into
CSV or a markdown table and :func:`emit_report` writes that text out.
"""

from __future__ import annotations

import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import DomainError, GoldbachError, ResourceLimitError
from .estimator import DEFAULT_CONFIG, EstimateConfig, estimate, ndf, round_half_away, unbalance
from .pairs import DEFAULT_REDUCED_CONVENTION, RangeKind, count_pairs, total_pairs
from .prime_engine import PrimeEngine, default_engine

TOTALS_EXTENDED_ABOVE = 10**8

ESTIMATE_COLUMNS = ("n", "ndf", "exact", "estimate", "ratio", "u", "correction", "corrected_ratio")
TOTALS_COLUMNS = ("n", "total", "approx", "ratio", "u", "u_sq", "u_32")


def _r4(x: float) -> float:
    return round_half_away(x, 4)


@dataclass(frozen=True)
class EstimateRow:
    n: int
    ndf: float
    exact: int
    estimate: int
    ratio: float
    u: float | None = None
    correction: float | None = None
    corrected_ratio: float | None = None


@dataclass(frozen=True)
class TotalsRow:
    """Cumulative totals for the sum bound ``n``.

    ``total`` counts odd-prime pairs with sum ``<= n``, ``approx`` is
    ``pi(n)**2 / 4`` and ``u`` is the unbalance at ``n // 2``.
    """

    n: int
    total: int
    approx: int
    ratio: float
    u: float
    u_sq: float
    u_32: float


def _reraise(n: int, exc: GoldbachError):
    raise type(exc)(f"row n={n}: {exc}") from exc


def build_row(
    n: int,
    kind: RangeKind | str = RangeKind.FULL,
    corrected: bool = False,
    engine: PrimeEngine | None = None,
    config: EstimateConfig = DEFAULT_CONFIG,
    convention: str = DEFAULT_REDUCED_CONVENTION,
) -> EstimateRow:
    kind = RangeKind.parse(kind)
    engine = engine or default_engine()
    try:
        exact = count_pairs(n, kind, engine, workers=1, convention=convention)
        est = round_half_away(estimate(n, kind, False, engine, config))
        if exact == 0:
            raise DomainError("no Goldbach pairs, ratio undefined")
        row = dict(n=n, ndf=ndf(n).rounded(4), exact=exact, estimate=est, ratio=_r4(est / exact))
        if corrected:
            uv = unbalance(n, kind, engine, config)
            row.update(
                u=uv.u, correction=uv.correction, corrected_ratio=_r4(est * uv.correction / exact)
            )
    except (DomainError, ResourceLimitError) as exc:
        _reraise(n, exc)
    return EstimateRow(**row)


def build_table(
    start_n: int,
    count: int,
    kind: RangeKind | str = RangeKind.FULL,
    corrected: bool = False,
    engine: PrimeEngine | None = None,
    config: EstimateConfig = DEFAULT_CONFIG,
    workers: int = 1,
    convention: str = DEFAULT_REDUCED_CONVENTION,
) -> list[EstimateRow]:
    """Rows for ``n = start_n .. start_n + count - 1``; the first failure aborts."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    engine = engine or default_engine()
    engine.ensure(2 * (start_n + count))
    ns = range(start_n, start_n + count)

    def one(n):
        return build_row(n, kind, corrected, engine, config, convention)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, ns))
    return [one(n) for n in ns]


def build_totals(
    bounds,
    engine: PrimeEngine | None = None,
    extended: bool = False,
) -> list[TotalsRow]:
    """One :class:`TotalsRow` per sum bound, in input order."""
    engine = engine or default_engine()
    rows = []
    for m in bounds:
        m = int(m)
        if m < 10 or m % 2:
            raise DomainError(f"sum bound must be even and >= 10, got {m}")
        if m > TOTALS_EXTENDED_ABOVE and not extended:
            raise ResourceLimitError(
                f"totals for {m} exceed {TOTALS_EXTENDED_ABOVE}; rerun with extended mode "
                "(and a pi cache to reuse prime counts)"
            )
        total = total_pairs(m, engine)
        p = engine.pi(m)
        approx = round_half_away(Fraction(p * p, 4))
        u = unbalance(m // 2, RangeKind.FULL, engine).u
        rows.append(TotalsRow(m, total, approx, total / approx, u, u * u, u**1.5))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{_r4(value):.4f}"
    return str(value)


def _markdown(header, body) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in body]
    return "\n".join(lines) + "\n"


def render_report(rows, fmt: str = "csv") -> str:
    rows = list(rows)
    if not rows:
        raise ValueError("cannot render an empty report")
    totals = isinstance(rows[0], TotalsRow)
    columns = TOTALS_COLUMNS if totals else ESTIMATE_COLUMNS
    cells = [[_fmt(getattr(r, c)) for c in columns] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")
    if totals:
        header = ["N", "prime pairs total", "estimate", "total/estimate", "U(N)", "U(N)^2", "U(N)^3/2"]
        return _markdown(header, cells)
    if rows[0].corrected_ratio is None:
        header = ["N", "NDF", "exact count", "estimate", "estimate/exact"]
        return _markdown(header, [c[:5] for c in cells])
    header = [
        "N", "exact count", "estimate", "estimate/exact",
        "U(N)", "U(N)^3/2 (correction)", "corr. estimate/exact",
    ]
    return _markdown(header, [[c[0], *c[2:]] for c in cells])


def emit_report(rows, fmt: str = "csv", destination="-") -> None:
    """Write rows to ``destination``; ``"-"`` means standard output."""
    text = render_report(rows, fmt)
    if destination == "-" or destination is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(Path(destination), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
