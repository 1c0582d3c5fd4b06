"""Flat key-value export of reports as text or CSV."""

from __future__ import annotations

import csv
import io
import math
import numbers
from dataclasses import asdict, is_dataclass


def flatten(obj):
    """Ordered {key: scalar} view of a StatSummary, FitReport, MotifVector or dict."""
    if hasattr(obj, "flat"):
        return obj.flat()
    if is_dataclass(obj):
        return asdict(obj)
    return dict(obj)


def fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        v = float(v)
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def to_text(obj):
    return "".join(f"{k}={fmt(v)}\n" for k, v in flatten(obj).items())


def to_csv(obj):
    row = flatten(obj)
    return rows_to_csv([row])


def rows_to_csv(rows, header=None):
    buf = io.StringIO()
    if header is None:
        header = []
        for r in rows:
            header.extend(k for k in r if k not in header)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(k, "")) for k in header])
    return buf.getvalue()


def export_report(obj, fmt_name="text", path=None):
    if fmt_name not in ("text", "csv"):
        raise ValueError(f"format must be text or csv, got {fmt_name!r}")
    out = to_text(obj) if fmt_name == "text" else to_csv(obj)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(out)
    return out


def write_rows(path, rows, header=None):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows, header))


def write_curve(path, pairs, names=("k", "value")):
    write_rows(path, [{names[0]: a, names[1]: b} for a, b in pairs], list(names))


def read_csv_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
