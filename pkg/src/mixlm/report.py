"""Report documents rendered as aligned text or JSON.

A :class:`ReportDocument` is an ordered list of sections (a table or a
paragraph) plus a dictionary of structured fields. Text output renders the
sections; JSON output carries the structured fields and every table cell at
full precision.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

SIGNIF_CODES = "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1"


def stars(p: float) -> str:
    if p is None or math.isnan(p):
        return ""
    for cut, mark in ((0.001, "***"), (0.01, "**"), (0.05, "*"), (0.1, ".")):
        if p < cut:
            return mark
    return ""


def _decimals_needed(v: float, digits: int) -> int:
    """Fewest decimals that show ``v`` to ``digits`` significant digits."""
    if v == 0 or not math.isfinite(v):
        return 0
    mag = math.floor(math.log10(abs(v)))
    full = max(0, digits - 1 - mag)
    target = round(v, full)
    for d in range(full + 1):
        if round(v, d) == target:
            return d
    return full


def format_column(values, digits: int = 4, sci_below: float = 1e-4) -> list[str]:
    """Format numbers with a shared number of decimals, R style.

    Each value is shown to ``digits`` significant digits with trailing zeros
    dropped; the column then uses the largest decimal count needed. Nonzero
    magnitudes below ``sci_below`` use scientific notation.
    """
    plain = [v for v in values if v is not None and math.isfinite(v) and not (0 < abs(v) < sci_below)]
    dec = max((_decimals_needed(v, digits) for v in plain), default=0)
    out = []
    for v in values:
        if v is None:
            out.append("")
        elif not math.isfinite(v):
            out.append("NaN" if math.isnan(v) else ("Inf" if v > 0 else "-Inf"))
        elif 0 < abs(v) < sci_below:
            out.append(f"{v:.{max(digits - 2, 1)}e}")
        else:
            out.append(f"{v:.{dec}f}")
    return out


def format_pvalue(p: float, digits: int = 3) -> str:
    if p is None or math.isnan(p):
        return ""
    if p < 2.2e-16:
        return "<2e-16"
    if p < 1e-4:
        return f"{p:.{digits - 1}e}"
    return f"{p:.{digits}g}"


def format_number(v: float, digits: int = 4) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    if not math.isfinite(v):
        return "NaN" if math.isnan(v) else ("Inf" if v > 0 else "-Inf")
    if 0 < abs(v) < 1e-4:
        return f"{v:.{max(digits - 2, 1)}e}"
    return f"{v:.{digits}g}"


@dataclass
class Table:
    """Columns of raw values and how to format each.

    ``formats`` entries: ``"str"`` (left aligned), ``"rstr"`` (right
    aligned), ``"int"``, ``"p"`` or ``"pN"`` (p-value
    with 3 or N significant digits),
    ``"stars"`` (significance marks from a p column), or ``"sigN"`` for a
    numeric column with N significant digits.
    """

    columns: list[str]
    rows: list[list[Any]]
    formats: list[str]
    row_names: list[str] | None = None

    def render(self) -> str:
        ncol = len(self.columns)
        cells = [[""] * ncol for _ in self.rows]
        for j, fmt in enumerate(self.formats):
            col = [r[j] for r in self.rows]
            if fmt.startswith("sig"):
                text = format_column([None if v is None else float(v) for v in col], int(fmt[3:]))
            elif fmt.startswith("p"):
                digits = int(fmt[1:]) if len(fmt) > 1 else 3
                text = [format_pvalue(v, digits) for v in col]
            elif fmt == "int":
                text = ["" if v is None else str(int(v)) for v in col]
            elif fmt == "stars":
                text = [stars(v) if v is not None else "" for v in col]
            else:
                text = ["" if v is None else str(v) for v in col]
            for i, t in enumerate(text):
                cells[i][j] = t
        names = self.row_names or [""] * len(self.rows)
        name_w = max([len(n) for n in names] + [0])
        widths = [max([len(self.columns[j])] + [len(c[j]) for c in cells]) for j in range(ncol)]
        lines = []
        header = " " * name_w + "".join(
            " " + (h.ljust(widths[j]) if self.formats[j] in ("str", "stars") else h.rjust(widths[j]))
            for j, h in enumerate(self.columns))
        lines.append(header.rstrip())
        for name, row in zip(names, cells):
            line = name.ljust(name_w) + "".join(
                " " + (c.ljust(widths[j]) if self.formats[j] in ("str", "stars") else c.rjust(widths[j]))
                for j, c in enumerate(row))
            lines.append(line.rstrip())
        return "\n".join(lines)

    def to_dict(self) -> dict:
        keep = [j for j, f in enumerate(self.formats) if f != "stars"]
        return {
            "columns": [self.columns[j] for j in keep],
            "row_names": self.row_names,
            "rows": [[_jsonable(r[j]) for j in keep] for r in self.rows],
        }


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if hasattr(v, "item"):
        return v.item()
    return v


@dataclass
class Section:
    title: str | None
    table: Table | None = None
    text: str | None = None

    def render(self) -> str:
        parts = []
        if self.title:
            parts.append(f"{self.title}:")
        if self.text:
            parts.append(self.text)
        if self.table is not None:
            parts.append(self.table.render())
        return "\n".join(parts)


@dataclass
class ReportDocument:
    sections: list[Section] = field(default_factory=list)
    fields: dict = field(default_factory=dict)

    def add(self, title=None, table=None, text=None) -> "ReportDocument":
        self.sections.append(Section(title, table, text))
        return self

    def to_text(self) -> str:
        return "\n\n".join(s.render() for s in self.sections) + "\n"

    def to_json(self) -> str:
        payload = dict(self.fields)
        payload["sections"] = [
            {"title": s.title, "text": s.text, "table": s.table.to_dict() if s.table else None}
            for s in self.sections
        ]
        return json.dumps(_clean(payload), indent=2) + "\n"

    def render(self, fmt: str = "text") -> str:
        if fmt not in ("text", "json"):
            raise ValueError(f"unknown report format {fmt!r}; expected text or json")
        return self.to_json() if fmt == "json" else self.to_text()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _jsonable(obj)
