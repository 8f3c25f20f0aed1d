"""Metrics records and CSV emission with a fixed column schema."""

from __future__ import annotations

import csv
from dataclasses import dataclass

__all__ = ["MetricsRecord", "COLUMNS", "TIMING_COLUMNS", "emit_report", "parse_report"]


@dataclass
class MetricsRecord:
    """One row of benchmark output; absent metrics stay None.

    Times are seconds internally and nanosecond integers in the CSV.
    """

    run: str = ""
    seed: int = 0
    step: int | None = None
    param: str | None = None
    value: float | None = None
    accuracy: float | None = None
    tpr: float | None = None
    tnr: float | None = None
    support_count: int | None = None
    query_time_proxy: float | None = None
    query_time_oracle: float | None = None
    update_time: float | None = None
    plan_time: float | None = None
    verify_time: float | None = None
    repair_time: float | None = None
    oracle_calls: int | None = None
    route: str | None = None
    certified: bool | None = None
    plan_found: bool | None = None


COLUMNS = (
    "run",
    "seed",
    "step",
    "param",
    "value",
    "accuracy",
    "tpr",
    "tnr",
    "support_count",
    "query_time_proxy_ns",
    "query_time_oracle_ns",
    "update_time_ns",
    "plan_time_ns",
    "verify_time_ns",
    "repair_time_ns",
    "oracle_calls",
    "route",
    "certified",
    "plan_found",
)

TIMING_COLUMNS = frozenset(
    c for c in COLUMNS if c.endswith("_ns")
)

_PROPORTIONS = ("accuracy", "tpr", "tnr")
_TIMES = ("query_time_proxy", "query_time_oracle", "update_time",
          "plan_time", "verify_time", "repair_time")
_BOOLS = ("certified", "plan_found")


def _to_row(rec: MetricsRecord) -> list[str]:
    row = [rec.run, str(rec.seed)]
    row.append("" if rec.step is None else str(rec.step))
    row.append(rec.param or "")
    row.append("" if rec.value is None else repr(float(rec.value)))
    for name in _PROPORTIONS:
        v = getattr(rec, name)
        row.append("" if v is None else f"{v:.6f}")
    row.append("" if rec.support_count is None else str(rec.support_count))
    for name in _TIMES:
        v = getattr(rec, name)
        row.append("" if v is None else str(int(round(v * 1e9))))
    row.append("" if rec.oracle_calls is None else str(rec.oracle_calls))
    row.append(rec.route or "")
    for name in _BOOLS:
        v = getattr(rec, name)
        row.append("" if v is None else ("1" if v else "0"))
    return row


def _from_row(row: list[str]) -> MetricsRecord:
    it = iter(row)
    rec = MetricsRecord(run=next(it), seed=int(next(it)))
    step = next(it)
    rec.step = int(step) if step else None
    param = next(it)
    rec.param = param or None
    value = next(it)
    rec.value = float(value) if value else None
    for name in _PROPORTIONS:
        v = next(it)
        setattr(rec, name, float(v) if v else None)
    sc = next(it)
    rec.support_count = int(sc) if sc else None
    for name in _TIMES:
        v = next(it)
        setattr(rec, name, int(v) / 1e9 if v else None)
    oc = next(it)
    rec.oracle_calls = int(oc) if oc else None
    route = next(it)
    rec.route = route or None
    for name in _BOOLS:
        v = next(it)
        setattr(rec, name, (v == "1") if v else None)
    return rec


def emit_report(records, path, summary_rows=None) -> None:
    """Write records as CSV with the fixed column order.

    ``summary_rows`` (param, value, name -> mean pairs) additionally go to
    ``<path>.summary.dat`` in gnuplot-friendly whitespace format.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for rec in records:
            writer.writerow(_to_row(rec))
    if summary_rows:
        names = sorted({k for _, _, stats in summary_rows for k in stats})
        with open(f"{path}.summary.dat", "w", encoding="utf-8") as fh:
            fh.write("# param value " + " ".join(names) + "\n")
            for param, value, stats in summary_rows:
                cells = [param, repr(float(value))]
                cells += [
                    ("nan" if stats.get(n) is None else repr(float(stats[n]))) for n in names
                ]
                fh.write(" ".join(cells) + "\n")


def parse_report(path) -> list[MetricsRecord]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header")
        return [_from_row(row) for row in reader]
