"""Complete-case model frames: response, fixed design, random-effect blocks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dataframe import DataFrame
from .errors import ColumnTypeError, DataError, FormulaError
from .formula import FormulaAst, RandomSpec, Term


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ZBlock:
    """Random-effects matrix for one ``(slopes | grouping)`` term.

    ``matrix`` is n x (q * g) with the q columns of group j stored at
    ``j*q : (j+1)*q``. ``group_codes[i]`` is the group of row i.
    """

    spec: RandomSpec
    matrix: np.ndarray
    column_names: tuple[str, ...]
    group_labels: tuple[str, ...]
    group_codes: np.ndarray

    @property
    def q(self) -> int:
        return len(self.column_names)

    @property
    def n_groups(self) -> int:
        return len(self.group_labels)

    @property
    def grouping(self) -> str:
        return self.spec.grouping


@dataclass(frozen=True)
class ModelFrame:
    formula: FormulaAst
    y: np.ndarray
    X: np.ndarray
    x_labels: tuple[str, ...]
    z_blocks: tuple[ZBlock, ...]
    kept_rows: np.ndarray
    term_columns: tuple[tuple[Term, tuple[int, ...]], ...] = ()

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def response(self) -> str | None:
        return self.formula.response

    @property
    def Z(self) -> np.ndarray:
        if not self.z_blocks:
            return np.zeros((self.n, 0))
        return np.hstack([b.matrix for b in self.z_blocks])

    def drop_row(self, i: int) -> "ModelFrame":
        """Frame without row position ``i``, groups left intact.

        Groups that become empty keep their (all-zero) columns, which the
        penalized fit handles without special casing.
        """
        keep = np.delete(np.arange(self.n), i)
        return self.subset(keep)

    def subset(self, rows) -> "ModelFrame":
        rows = np.asarray(rows, dtype=np.int64)
        blocks = tuple(
            ZBlock(b.spec, _frozen(b.matrix[rows]), b.column_names, b.group_labels,
                   _frozen_int(b.group_codes[rows]))
            for b in self.z_blocks
        )
        return ModelFrame(self.formula, _frozen(self.y[rows]), _frozen(self.X[rows]),
                          self.x_labels, blocks, _frozen_int(self.kept_rows[rows]),
                          self.term_columns)


def _frozen_int(arr):
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def _variable_columns(df: DataFrame, name: str, rows: np.ndarray):
    col = df[name]
    if col.is_numeric:
        return [(name, col.values[rows].astype(float))]
    codes = col.values[rows]
    return [(f"{name}{lvl}", (codes == k).astype(float))
            for k, lvl in enumerate(col.levels) if k > 0]


def _term_columns(df: DataFrame, term: Term, rows: np.ndarray):
    per_var = [_variable_columns(df, v, rows) for v in term.variables]
    out = []
    # first variable varies fastest
    for combo in itertools.product(*reversed(per_var)):
        combo = combo[::-1]
        label = ":".join(c[0] for c in combo)
        values = np.prod([c[1] for c in combo], axis=0)
        out.append((label, values))
    return out


def _grouping_codes(df: DataFrame, name: str, rows: np.ndarray):
    col = df[name]
    if col.is_numeric:
        vals = col.values[rows]
        if not np.all(vals == np.round(vals)):
            raise ColumnTypeError(f"grouping variable {name!r} is numeric with non-integer values")
        uniq = np.unique(vals)
        labels = tuple(str(int(v)) for v in uniq)
        codes = np.searchsorted(uniq, vals)
        return labels, codes
    used = np.unique(col.values[rows])
    labels = tuple(col.levels[k] for k in used)
    codes = np.searchsorted(used, col.values[rows])
    return labels, codes


def build_model_frame(df: DataFrame, ast: FormulaAst) -> ModelFrame:
    """Build y, X and the random-effect blocks over the complete cases.

    Categorical predictors use treatment coding with the first (sorted)
    level as reference. A numeric grouping variable is accepted only when
    every value is an integer; its groups are then ordered numerically.
    """
    for name in ast.variables:
        if name not in df:
            raise FormulaError(f"unknown variable {name!r} in formula")
    if ast.response is None:
        raise FormulaError("formula has no response")
    if not df[ast.response].is_numeric:
        raise ColumnTypeError(f"response {ast.response!r} is categorical")

    complete = np.ones(df.n_rows, dtype=bool)
    for name in ast.variables:
        complete &= ~df[name].missing
    rows = np.flatnonzero(complete)
    if rows.size == 0:
        raise DataError("no complete rows remain for the variables in the formula")

    y = df[ast.response].values[rows]
    labels: list[str] = []
    cols: list[np.ndarray] = []
    term_cols = []
    for term in ast.fixed_terms:
        if term.is_intercept:
            built = [("(Intercept)", np.ones(rows.size))]
        else:
            built = _term_columns(df, term, rows)
        start = len(labels)
        for label, values in built:
            labels.append(label)
            cols.append(values)
        term_cols.append((term, tuple(range(start, len(labels)))))
    X = np.column_stack(cols)

    blocks = []
    for spec in ast.random_specs:
        names, zcols = [], []
        for term in spec.slope_terms:
            built = [("(Intercept)", np.ones(rows.size))] if term.is_intercept else _term_columns(df, term, rows)
            for label, values in built:
                names.append(label)
                zcols.append(values)
        group_labels, codes = _grouping_codes(df, spec.grouping, rows)
        q, g = len(names), len(group_labels)
        Z = np.zeros((rows.size, q * g))
        local = np.column_stack(zcols)
        for k in range(q):
            Z[np.arange(rows.size), codes * q + k] = local[:, k]
        blocks.append(ZBlock(spec, _frozen(Z), tuple(names), group_labels, _frozen_int(codes)))

    return ModelFrame(ast, _frozen(y), _frozen(X), tuple(labels), tuple(blocks),
                      _frozen_int(rows), tuple(term_cols))
