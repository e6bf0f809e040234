"""Minimal column-oriented data frame with CSV ingestion.

Numeric columns hold ``float64`` values with ``NaN`` marking a missing cell.
Categorical columns hold integer codes into a sorted level list, with ``-1``
marking a missing cell. Frames and columns are immutable; every transform
returns a new frame.

Row numbers reported to users (missing cells, error messages) are 1-based
record numbers, not counting the header line.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import os
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ColumnTypeError, DataError, DomainError

MISSING_TOKENS = frozenset({"", "NA"})
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _level_key(level: str) -> bytes:
    return level.encode("utf-8")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Column:
    """A named column, either numeric or categorical.

    For numeric columns ``levels`` is ``None`` and ``values`` is a float
    array. For categorical columns ``values`` holds integer codes into
    ``levels``.
    """

    name: str
    values: np.ndarray
    levels: tuple[str, ...] | None = None

    @classmethod
    def numeric(cls, name: str, values: Iterable[float | None]) -> "Column":
        arr = np.array([np.nan if v is None else float(v) for v in values], dtype=float)
        return cls(name, _frozen(arr))

    @classmethod
    def categorical(cls, name: str, values: Iterable[str | None]) -> "Column":
        cells = [None if v is None or v in MISSING_TOKENS else str(v) for v in values]
        levels = tuple(sorted({c for c in cells if c is not None}, key=_level_key))
        index = {lvl: i for i, lvl in enumerate(levels)}
        codes = np.array([-1 if c is None else index[c] for c in cells], dtype=np.int64)
        return cls(name, _frozen(codes), levels)

    @property
    def is_numeric(self) -> bool:
        return self.levels is None

    @property
    def missing(self) -> np.ndarray:
        if self.is_numeric:
            return np.isnan(self.values)
        return self.values < 0

    def __len__(self) -> int:
        return len(self.values)

    def cell(self, i: int):
        """Python value of row ``i`` (0-based); ``None`` if missing."""
        v = self.values[i]
        if self.is_numeric:
            return None if np.isnan(v) else float(v)
        return None if v < 0 else self.levels[v]

    def labels(self) -> list[str | None]:
        return [self.cell(i) for i in range(len(self))]

    def take(self, rows: np.ndarray) -> "Column":
        return Column(self.name, _frozen(self.values[rows]), self.levels)


@dataclass(frozen=True)
class DataFrame:
    columns: tuple[Column, ...]
    n_rows: int = field(default=-1)

    def __post_init__(self):
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        names = [c.name for c in cols]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise DataError(f"duplicate column names: {', '.join(dupes)}")
        lengths = {len(c) for c in cols}
        if len(lengths) > 1:
            raise DataError("columns differ in length")
        n = lengths.pop() if lengths else 0
        if self.n_rows not in (-1, n):
            raise DataError(f"n_rows={self.n_rows} but columns have {n} cells")
        object.__setattr__(self, "n_rows", n)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def __getitem__(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def with_column(self, column: Column) -> "DataFrame":
        """Append ``column``, or replace an existing column of the same name."""
        if len(column) != self.n_rows:
            raise DataError(f"column {column.name!r} has {len(column)} cells, frame has {self.n_rows} rows")
        cols = [column if c.name == column.name else c for c in self.columns]
        if column.name not in self:
            cols.append(column)
        return DataFrame(tuple(cols))

    def take(self, rows: Sequence[int] | np.ndarray) -> "DataFrame":
        """Frame restricted to the given 0-based row positions, in that order."""
        idx = np.asarray(rows, dtype=np.int64)
        return DataFrame(tuple(c.take(idx) for c in self.columns))


def _open_text(source) -> IO[str]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8-sig", newline="")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data, newline="")


def _is_number(token: str) -> bool:
    return _NUMBER.fullmatch(token.strip()) is not None


def read_csv(source) -> DataFrame:
    """Read a comma-separated file with a mandatory header line.

    ``source`` may be a path or a binary/text file object. A column is
    numeric when every non-missing cell parses as a decimal number
    (scientific notation allowed); otherwise it is categorical. ``NA`` and
    the empty field are missing.
    """
    fh = _open_text(source)
    try:
        records = list(csv.reader(fh))
    except csv.Error as exc:
        raise DataError(f"malformed CSV: {exc}") from None
    finally:
        fh.close()
    records = [r for r in records if r]
    if not records:
        raise DataError("empty input: no header line")
    header, rows = records[0], records[1:]
    header = [h.strip() for h in header]
    seen = set()
    for h in header:
        if h in seen:
            raise DataError(f"duplicate header name {h!r}")
        seen.add(h)
    if not rows:
        raise DataError("empty data: header present but no data rows")
    for i, r in enumerate(rows, start=1):
        if len(r) != len(header):
            raise DataError(f"row {i}: expected {len(header)} fields, found {len(r)}")

    columns = []
    for j, name in enumerate(header):
        cells = [r[j] for r in rows]
        present = [c for c in cells if c.strip() not in MISSING_TOKENS]
        if all(_is_number(c) for c in present):
            columns.append(Column.numeric(
                name, [None if c.strip() in MISSING_TOKENS else float(c) for c in cells]))
        else:
            columns.append(Column.categorical(name, cells))
    return DataFrame(tuple(columns))


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def write_csv(df: DataFrame, dest=None) -> str:
    """Serialize ``df`` as CSV; missing cells become ``NA``.

    Returns the text, and also writes it to ``dest`` (path or text file
    object) when given.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(df.names)
    for i in range(df.n_rows):
        row = []
        for c in df.columns:
            v = c.cell(i)
            if v is None:
                row.append("NA")
            elif c.is_numeric:
                row.append(_format_number(v))
            else:
                row.append(v)
        writer.writerow(row)
    text = buf.getvalue()
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif dest is not None:
        dest.write(text)
    return text


def missing_report(df: DataFrame) -> list[tuple[int, str]]:
    """All missing cells as ``(row, column)`` pairs, column-major order.

    Rows are 1-based.
    """
    out = []
    for c in df.columns:
        out.extend((int(i) + 1, c.name) for i in np.flatnonzero(c.missing))
    return out


def _numeric_column(df: DataFrame, col: str) -> Column:
    if col not in df:
        raise DataError(f"unknown column {col!r}")
    c = df[col]
    if not c.is_numeric:
        raise ColumnTypeError(f"column {col!r} is categorical, expected numeric")
    return c


def derive_center(df: DataFrame, col: str) -> DataFrame:
    """Add ``<col>.c``: the column minus its mean over non-missing cells."""
    c = _numeric_column(df, col)
    present = c.values[~c.missing]
    if present.size == 0:
        raise DataError(f"column {col!r} has no non-missing values")
    mean = math.fsum(present) / present.size
    return df.with_column(Column(f"{col}.c", _frozen(c.values - mean)))


_TRANSFORMS = {"log": ".log", "square": ".sq"}


def derive_transform(df: DataFrame, col: str, kind: str) -> DataFrame:
    """Add ``<col>.log`` or ``<col>.sq`` (``kind`` is ``"log"`` or ``"square"``)."""
    if kind not in _TRANSFORMS:
        raise ValueError(f"unknown transform {kind!r}; expected one of {sorted(_TRANSFORMS)}")
    c = _numeric_column(df, col)
    v = c.values
    if kind == "log":
        bad = np.flatnonzero(~c.missing & (v <= 0))
        if bad.size:
            row = int(bad[0]) + 1
            raise DomainError(f"log of nonpositive value {v[bad[0]]:g} in column {col!r}, row {row}")
        with np.errstate(invalid="ignore"):
            out = np.log(v)
    else:
        out = v * v
    return df.with_column(Column(col + _TRANSFORMS[kind], _frozen(out)))


def _median(sorted_vals: np.ndarray) -> float:
    n = len(sorted_vals)
    mid = n // 2
    if n % 2:
        return float(sorted_vals[mid])
    return float((sorted_vals[mid - 1] + sorted_vals[mid]) / 2)


def five_number(values: Sequence[float]) -> tuple[float, float, float, float, float]:
    """Tukey five-number summary: min, lower hinge, median, upper hinge, max.

    Hinges are medians of the lower and upper halves; for odd n the median
    belongs to both halves.
    """
    v = np.sort(np.asarray(values, dtype=float))
    n = len(v)
    if n == 0:
        raise DataError("five-number summary of an empty sample")
    half = (n + 1) // 2
    return (float(v[0]), _median(v[:half]), _median(v), _median(v[n - half:]), float(v[-1]))


@dataclass(frozen=True)
class GroupStats:
    labels: tuple[str, ...]
    min: float
    q1: float
    median: float
    q3: float
    max: float
    n: int


def group_stats(df: DataFrame, response: str, factors: Sequence[str]) -> list[GroupStats]:
    """Five-number summaries of ``response`` per factor-level combination.

    Combinations are listed with the first factor outermost, levels in their
    sorted order; empty combinations are omitted.
    """
    y = _numeric_column(df, response)
    facs = []
    for f in factors:
        if f not in df:
            raise DataError(f"unknown column {f!r}")
        if df[f].is_numeric:
            raise ColumnTypeError(f"grouping column {f!r} is numeric, expected categorical")
        facs.append(df[f])
    keep = ~y.missing
    for f in facs:
        keep &= ~f.missing
    out = []
    for combo in itertools.product(*(range(len(f.levels)) for f in facs)):
        mask = keep.copy()
        for f, code in zip(facs, combo):
            mask &= f.values == code
        if not mask.any():
            continue
        stats = five_number(y.values[mask])
        labels = tuple(f.levels[code] for f, code in zip(facs, combo))
        out.append(GroupStats(labels, *stats, n=int(mask.sum())))
    return out
