# optlink/report.py
"""Rendering of budgets and result tables as aligned text, CSV or records."""
from __future__ import annotations

import csv
import io
import math
import re
from fractions import Fraction
from pathlib import Path

from .budget import BudgetReport, RangeRow
from .errors import ScenarioError
from .gainopt import SweepRow

FORMATS = ("text", "csv", "records")
PRECISIONS = ("paper", "full")
SWEEP_COLUMNS = ("gain_db", "attenuation_db", "geff_db")
SCI_BELOW = 0.05  # smaller magnitudes print in scientific notation


def fmt_value(value, precision: str = "paper") -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, int, str, Fraction)):
        return str(value)
    value = float(value)
    if precision == "full" or not math.isfinite(value):
        return repr(value)
    if value.is_integer() and abs(value) < 1e5:
        return f"{value:.0f}"
    if value != 0 and not SCI_BELOW <= abs(value) < 1e5:
        return f"{value:.2e}"
    return f"{value:.2f}"


def fmt_db(value, precision: str = "paper") -> str:
    if value is None:
        return ""
    if precision == "full" or not math.isfinite(value):
        return repr(float(value))
    # avoid "-0.00"
    return f"{value + 0.0:.2f}" if round(value, 2) != 0 else "0.00"


def _slug(label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_")


# ------------------ Budget ------------------
def budget_text(report: BudgetReport, precision: str = "paper") -> str:
    rows = [("Link Parameter", "dB", "Value", "Units")]
    sections = []
    for it in report.items:
        if it.section not in sections:
            sections.append(it.section)
            rows.append((f"[{it.section}]", "", "", ""))
        rows.append((it.label, fmt_db(it.db, precision), fmt_value(it.value, precision), it.units))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = [report.title, ""]
    for i, r in enumerate(rows):
        lines.append(
            f"{r[0]:<{widths[0]}}  {r[1]:>{widths[1]}}  {r[2]:>{widths[2]}}  {r[3]}".rstrip()
        )
        if i == 0:
            lines.append("-" * (sum(widths) + 6))
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def budget_csv(report: BudgetReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("section", "label", "db", "value", "units"))
    for it in report.items:
        writer.writerow(
            (it.section, it.label, fmt_db(it.db, "full"), fmt_value(it.value, "full"), it.units)
        )
    return buf.getvalue()


def budget_records(report: BudgetReport, precision: str = "paper") -> str:
    lines = []
    for it in report.items:
        key = _slug(it.label)
        if it.db is not None:
            lines.append(f"{key}.db={fmt_db(it.db, precision)}")
        if it.value is not None:
            lines.append(f"{key}.value={fmt_value(it.value, precision)}")
    for i, note in enumerate(report.notes):
        lines.append(f"note.{i}={note}")
    return "\n".join(lines) + "\n"


def render_budget(report: BudgetReport, fmt: str = "text", precision: str = "paper") -> str:
    if fmt == "csv":
        return budget_csv(report)
    if fmt == "records":
        return budget_records(report, precision)
    return budget_text(report, precision)


# ------------------ Generic rows ------------------
def render_rows(rows: list[dict], fmt: str = "text", precision: str = "paper") -> str:
    """Render a list of same-keyed dicts. CSV always carries full precision."""
    if not rows:
        return ""
    columns = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt_value(row[c], "full") for c in columns])
        return buf.getvalue()
    if fmt == "records":
        lines = []
        for i, row in enumerate(rows):
            prefix = f"{i}." if len(rows) > 1 else ""
            lines.extend(f"{prefix}{c}={fmt_value(row[c], precision)}" for c in columns)
        return "\n".join(lines) + "\n"
    cells = [columns] + [[fmt_value(row[c], precision) for c in columns] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(f"{v:>{w}}" for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


# ------------------ Sweeps ------------------
def sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow((repr(row.gain_db), repr(row.attenuation_db), repr(row.g_eff_db)))
    return buf.getvalue()


def read_sweep_csv(source) -> list[SweepRow]:
    """Parse a sweep CSV from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8", newline="") as f:
            return read_sweep_csv(f)
    reader = csv.DictReader(source)
    if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
        raise ScenarioError(f"sweep CSV header must be {','.join(SWEEP_COLUMNS)}")
    try:
        return [
            SweepRow(float(r["gain_db"]), float(r["attenuation_db"]), float(r["geff_db"]))
            for r in reader
        ]
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"bad sweep CSV row: {e}") from e


# ------------------ Range tables ------------------
def range_table_text(rows: list[RangeRow], accuracy_label: str, precision: str = "paper") -> str:
    """Accuracy down, PPM order across, with a data-rate footer."""
    orders = list(dict.fromkeys(r.ppm_order for r in rows))
    accuracies = list(dict.fromkeys(r.accuracy for r in rows))
    by_key = {(r.accuracy, r.ppm_order): r for r in rows}
    range_fmt = (lambda v: repr(v)) if precision == "full" else (lambda v: f"{v:.3f}")
    header = [f"{accuracy_label} [urad]"] + [
        f"{m} / {by_key[(accuracies[0], m)].peak_power_w:g} W" for m in orders
    ]
    cells = [header]
    for acc in accuracies:
        cells.append([f"{acc * 1e6:.2f}"] + [range_fmt(by_key[(acc, m)].range_au) for m in orders])
    cells.append(
        ["Data Rate [kbps]"] + [f"{by_key[(accuracies[0], m)].data_rate_bps / 1e3:.2f}" for m in orders]
    )
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for i, r in enumerate(cells):
        lines.append(f"{r[0]:<{widths[0]}}  " + "  ".join(f"{v:>{w}}" for v, w in zip(r[1:], widths[1:])))
        if i == 0 or i == len(cells) - 2:
            lines.append("-" * len(lines[-1]))
    return "\n".join(lines) + "\n"


def range_table_rows(rows: list[RangeRow]) -> list[dict]:
    return [
        {
            "accuracy_urad": r.accuracy * 1e6,
            "ppm_order": r.ppm_order,
            "peak_power_w": r.peak_power_w,
            "data_rate_kbps": r.data_rate_bps / 1e3,
            "range_au": r.range_au,
        }
        for r in rows
    ]
