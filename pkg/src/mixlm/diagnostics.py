"""Assumption checks for fitted models.

Residual-vs-fitted scatter, residual histogram and normal Q-Q data,
predictor collinearity, and leave-one-out influence (DFbeta for linear
models, refit loops for mixed models).
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .design import ModelFrame
from .errors import ConvergenceError, DataError, SingularDesignError
from .lmm import fit_lmm
from .numstat import normal_quantile
from .ols import least_squares

R_THRESHOLD = 0.8
VIF_THRESHOLD = 5.0
HALF_MAGNITUDE = 0.5


@dataclass(frozen=True)
class PlotSeries:
    """Plot-ready data.

    ``kind`` is ``"scatter"``, ``"qq"`` (columns x, y) or ``"histogram"``
    (columns left edge, right edge, count).
    """

    kind: str
    data: np.ndarray
    x_label: str
    y_label: str

    def __len__(self) -> int:
        return len(self.data)

    @property
    def columns(self) -> tuple[str, ...]:
        if self.kind == "histogram":
            return ("edge_left", "edge_right", "count")
        return ("x", "y")

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.data:
            if self.kind == "histogram":
                lines.append(f"{row[0]!r},{row[1]!r},{int(row[2])}")
            else:
                lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _residuals(fit) -> np.ndarray:
    if hasattr(fit, "residuals"):
        return np.asarray(fit.residuals, dtype=float)
    return np.asarray(fit, dtype=float)


def residual_fitted(fit) -> PlotSeries:
    data = np.column_stack([fit.fitted, fit.residuals])
    return PlotSeries("scatter", data, "fitted", "residuals")


def sturges_bins(n: int) -> int:
    return int(math.ceil(math.log2(n))) + 1 if n > 1 else 1


def histogram_residuals(fit, n_bins: int | None = None) -> PlotSeries:
    """Equal-width histogram over [min, max]; the last bin is closed.

    ``fit`` may be a fitted model or a plain residual vector. The default
    bin count follows Sturges' rule.
    """
    r = _residuals(fit)
    if n_bins is None:
        n_bins = sturges_bins(len(r))
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    lo, hi = float(r.min()), float(r.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    data = np.column_stack([edges[:-1], edges[1:], counts.astype(float)])
    return PlotSeries("histogram", data, "residuals", "count")


def plotting_positions(n: int) -> np.ndarray:
    i = np.arange(1, n + 1)
    if n <= 10:
        return (i - 3.0 / 8.0) / (n + 0.25)
    return (i - 0.5) / n


def qq_points(fit) -> PlotSeries:
    """Sorted residuals against standard normal quantiles."""
    r = np.sort(_residuals(fit))
    if len(r) < 2:
        raise DataError("Q-Q plot needs at least 2 residuals")
    theo = np.array([normal_quantile(p) for p in plotting_positions(len(r))])
    return PlotSeries("qq", np.column_stack([theo, r]), "theoretical quantiles", "sample quantiles")


@dataclass(frozen=True)
class InfluenceFlag:
    row: int
    coefficient: str
    reason: str


@dataclass(frozen=True)
class InfluenceReport:
    labels: tuple[str, ...]
    coefficients: np.ndarray
    dfbeta: np.ndarray
    flags: tuple[InfluenceFlag, ...] = field(default=())

    def to_csv(self) -> str:
        lines = ["row," + ",".join(self.labels)]
        for i, row in enumerate(self.dfbeta, start=1):
            lines.append(f"{i}," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _loo_ols(X, y, labels, i):
    keep = np.delete(np.arange(len(y)), i)
    try:
        beta, _ = least_squares(X[keep], y[keep], labels)
    except SingularDesignError as exc:
        raise SingularDesignError(f"design is singular without row {i + 1}: {exc}") from None
    return beta


def dfbeta_ols(frame: ModelFrame, half_magnitude: float = HALF_MAGNITUDE) -> InfluenceReport:
    """Full-data coefficients minus leave-one-out coefficients, by refitting.

    Row i of ``dfbeta`` is beta(all rows) - beta(without row i).
    """
    X, y = frame.X, frame.y
    n, p = X.shape
    if n <= p + 1:
        raise DataError(f"leave-one-out needs more than {p + 1} rows, have {n}")
    labels = list(frame.x_labels)
    beta, _ = least_squares(X, y, labels)
    dfb = np.array([beta - _loo_ols(X, y, labels, i) for i in range(n)])
    report = InfluenceReport(frame.x_labels, beta, dfb)
    flags = influence_flags(report, beta, half_magnitude=half_magnitude)
    return InfluenceReport(frame.x_labels, beta, dfb, tuple(flags))


def dfbeta_closed_form(frame: ModelFrame) -> np.ndarray:
    """Hat-matrix identity (X'X)^-1 x_i e_i / (1 - h_ii), for cross-checking."""
    X, y = frame.X, frame.y
    beta, cov = least_squares(X, y, list(frame.x_labels))
    e = y - X @ beta
    h = np.einsum("ij,jk,ik->i", X, cov, X)
    return (X @ cov) * (e / (1.0 - h))[:, None]


def influence_flags(report, coefficients, labels=None,
                    half_magnitude: float = HALF_MAGNITUDE) -> list[InfluenceFlag]:
    """Flag influential rows.

    ``"half-magnitude"`` when |dfbeta| reaches ``half_magnitude`` times
    |coefficient|; ``"sign-change"`` when dropping the row flips the
    coefficient's sign. Rows are 1-based.
    """
    if isinstance(report, InfluenceReport):
        dfb, labels = report.dfbeta, labels or report.labels
    else:
        dfb = np.atleast_2d(np.asarray(report, dtype=float))
    coefficients = np.asarray(coefficients, dtype=float)
    labels = labels or tuple(f"b{j}" for j in range(len(coefficients)))
    out = []
    for i, row in enumerate(dfb, start=1):
        for j, d in enumerate(row):
            b = coefficients[j]
            if abs(d) >= half_magnitude * abs(b):
                out.append(InfluenceFlag(i, labels[j], "half-magnitude"))
            if np.sign(b) != np.sign(b - d):
                out.append(InfluenceFlag(i, labels[j], "sign-change"))
    return out


def _resolve_coef(frame: ModelFrame, coef) -> int:
    if isinstance(coef, str):
        if coef not in frame.x_labels:
            raise KeyError(f"no fixed effect named {coef!r}; have {', '.join(frame.x_labels)}")
        return frame.x_labels.index(coef)
    if not 1 <= coef <= frame.p:
        raise IndexError(f"coefficient position {coef} outside 1..{frame.p}")
    return coef - 1


def _loo_lmm(args):
    frame, reml, start, i, j = args
    try:
        fit = fit_lmm(frame.drop_row(i), reml=reml, start=start)
    except ConvergenceError:
        return i, math.nan
    return i, float(fit.coefficients[j])


def loo_fixed_effect(frame: ModelFrame, reml: bool, coef, workers: int = 1,
                     full_fit=None) -> np.ndarray:
    """Refit a mixed model once per held-out row and collect one fixed effect.

    ``coef`` is either a coefficient label or its 1-based position in the
    fixed-effects table. Each refit starts from the full-data optimum.
    Rows whose refit fails to converge are NaN and trigger a warning.
    """
    j = _resolve_coef(frame, coef)
    full = full_fit or fit_lmm(frame, reml=reml)
    jobs = [(frame, reml, full.theta, i, j) for i in range(frame.n)]
    out = np.empty(frame.n)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_loo_lmm, jobs, chunksize=max(1, frame.n // (4 * workers))))
    else:
        results = [_loo_lmm(job) for job in jobs]
    for i, value in results:
        out[i] = value
    failed = np.flatnonzero(np.isnan(out))
    if failed.size:
        warnings.warn(f"leave-one-out refit did not converge for rows {', '.join(str(i + 1) for i in failed)}",
                      RuntimeWarning, stacklevel=2)
    return out


@dataclass(frozen=True)
class CollinearityReport:
    pairs: tuple[tuple[str, str, float, bool], ...]
    vif: tuple[tuple[str, float, bool], ...]

    @property
    def flagged(self) -> bool:
        return any(p[3] for p in self.pairs) or any(v[2] for v in self.vif)

    def to_csv(self) -> str:
        lines = ["kind,a,b,value,flagged"]
        for a, b, r, f in self.pairs:
            lines.append(f"pearson_r,{a},{b},{r!r},{int(f)}")
        for a, v, f in self.vif:
            lines.append(f"vif,{a},,{v!r},{int(f)}")
        return "\n".join(lines) + "\n"


def collinearity_report(frame: ModelFrame, r_threshold: float = R_THRESHOLD,
                        vif_threshold: float = VIF_THRESHOLD) -> CollinearityReport:
    """Pairwise correlations and variance inflation factors of predictors.

    Uses the non-intercept columns of the fixed design. VIF_j is
    1 / (1 - R^2_j) from regressing column j on the other columns plus an
    intercept.
    """
    idx = [k for k, name in enumerate(frame.x_labels) if name != "(Intercept)"]
    names = [frame.x_labels[k] for k in idx]
    cols = frame.X[:, idx]
    for k, name in enumerate(names):
        if np.ptp(cols[:, k]) == 0:
            raise DataError(f"column {name!r} is constant; correlation is undefined")
    pairs = []
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            r = float(np.corrcoef(cols[:, a], cols[:, b])[0, 1])
            pairs.append((names[a], names[b], r, abs(r) >= r_threshold))
    vifs = []
    n = frame.n
    for a, name in enumerate(names):
        others = np.delete(cols, a, axis=1)
        if others.shape[1] == 0:
            vif = 1.0
        else:
            if n <= others.shape[1] + 1:
                raise DataError("too few rows to compute variance inflation factors")
            design = np.column_stack([np.ones(n), others])
            coef, *_ = np.linalg.lstsq(design, cols[:, a], rcond=None)
            resid = cols[:, a] - design @ coef
            dev = cols[:, a] - cols[:, a].mean()
            r2 = 1.0 - float(resid @ resid) / float(dev @ dev)
            vif = math.inf if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
        vifs.append((name, vif, vif >= vif_threshold))
    return CollinearityReport(tuple(pairs), tuple(vifs))
