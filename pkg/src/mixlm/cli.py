"""Command-line front end.

Subcommands ``fit``, ``compare``, ``diagnose``, ``describe`` and
``simulate``. Reports go to stdout (or ``--out``), warnings and errors to
stderr. Exit codes: 0 success, 2 usage or formula error, 3 data or IO
error, 4 convergence failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .dataframe import DataFrame, group_stats, missing_report, read_csv
from .design import build_model_frame
from .diagnostics import (collinearity_report, dfbeta_ols, histogram_residuals, influence_flags,
                          loo_fixed_effect, qq_points, residual_fitted)
from .errors import (ConvergenceError, DataError, FormulaError, MixlmError, ModelError,
                     SingularDesignError)
from .formula import format_formula, parse_formula
from .inference import LrtResult, lrt_compare
from .lmm import LmmFit, fit_lmm
from .numstat import Rng
from .ols import OlsFit, fit_ols
from .plots import scatter_svg, series_svg
from .report import (SIGNIF_CODES, ReportDocument, Table, format_column, format_number,
                     format_pvalue)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE = 0, 2, 3, 4

REML_CAVEAT = ("note: REML criteria are comparable only between fits with identical fixed "
               "effects; use --ml (or the compare command) to compare fixed-effect structures.")


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, (DataError, SingularDesignError, OSError)):
        return EXIT_DATA
    if isinstance(exc, (FormulaError, ModelError, KeyError, IndexError)):
        return EXIT_USAGE
    return EXIT_DATA


# -- fitting helpers ---------------------------------------------------------

def _frame(df: DataFrame, formula: str):
    return build_model_frame(df, parse_formula(formula))


def _fit(df: DataFrame, formula: str, reml: bool, mixed: bool):
    frame = _frame(df, formula)
    if not frame.z_blocks and not mixed:
        return fit_ols(frame)
    return fit_lmm(frame, reml=reml)


def _emit_warnings(messages) -> None:
    for msg in messages:
        print(f"warning: {msg}", file=sys.stderr)


# -- OLS and LMM reports -----------------------------------------------------

def _coef_fields(labels, est, se, tv, pv=None) -> list[dict]:
    out = []
    for k, name in enumerate(labels):
        row = {"term": name, "estimate": est[k], "std_error": se[k], "t_value": tv[k]}
        if pv is not None:
            row["p_value"] = pv[k]
        out.append(row)
    return out


def ols_report(fit: OlsFit) -> ReportDocument:
    doc = ReportDocument()
    doc.add("Call", text=f"ols({format_formula(fit.frame.formula)})")
    r = fit.residuals
    if fit.df_resid > 5:
        q = np.percentile(r, [0, 25, 50, 75, 100])
        doc.add("Residuals", Table(["Min", "1Q", "Median", "3Q", "Max"], [list(q)], ["sig4"] * 5))
    else:
        cells = format_column(list(map(float, r)), 4)
        doc.add("Residuals", Table([str(i) for i in range(1, len(r) + 1)], [cells], ["rstr"] * len(r)))
    rows = [[fit.coefficients[k], fit.std_errors[k], fit.t_values[k], fit.p_values[k], fit.p_values[k]]
            for k in range(len(fit.labels))]
    doc.add("Coefficients", Table(["Estimate", "Std. Error", "t value", "Pr(>|t|)", ""], rows,
                                  ["sig4", "sig4", "sig4", "p", "stars"], list(fit.labels)))
    f1, f2 = fit.f_df
    lines = [
        "---",
        SIGNIF_CODES,
        "",
        f"Residual standard error: {format_number(fit.sigma)} on {fit.df_resid} degrees of freedom",
        f"Multiple R-squared: {format_number(fit.r2)},\tAdjusted R-squared: {format_number(fit.adj_r2)}",
    ]
    if math.isfinite(fit.f_stat):
        lines.append(f"F-statistic: {format_number(fit.f_stat)} on {f1} and {f2} DF,  "
                     f"p-value: {format_pvalue(fit.f_p, 4)}")
    doc.add(None, text="\n".join(lines))
    doc.fields = {
        "model": "ols",
        "formula": format_formula(fit.frame.formula),
        "n_obs": int(len(r)),
        "coefficients": _coef_fields(fit.labels, fit.coefficients, fit.std_errors, fit.t_values,
                                     fit.p_values),
        "residuals": list(r),
        "sigma": fit.sigma,
        "df_resid": fit.df_resid,
        "r_squared": fit.r2,
        "adj_r_squared": fit.adj_r2,
        "f_statistic": {"value": fit.f_stat, "df1": f1, "df2": f2, "p": fit.f_p},
    }
    return doc


def _varcomp_rows(fit: LmmFit):
    rows, fields = [], []
    order = sorted(range(len(fit.varcomps)), key=lambda k: -fit.frame.z_blocks[k].n_groups)
    for k in order:
        vc = fit.varcomps[k]
        corr = vc.correlations
        for a, name in enumerate(vc.names):
            cells = "" if corr is None or a == 0 else " ".join(f"{corr[a, b]:.3f}" for b in range(a))
            rows.append([vc.grouping if a == 0 else "", name, vc.variances[a], vc.std_devs[a], cells])
        fields.append({"group": vc.grouping, "names": list(vc.names),
                       "variances": list(vc.variances), "std_devs": list(vc.std_devs),
                       "correlations": None if corr is None else corr.tolist()})
    rows.append(["Residual", "", fit.residual_variance, fit.sigma, ""])
    fields.append({"group": "Residual", "names": [], "variances": [fit.residual_variance],
                   "std_devs": [fit.sigma], "correlations": None})
    return rows, fields


def lmm_report(fit: LmmFit) -> ReportDocument:
    doc = ReportDocument()
    method = "REML" if fit.reml else "maximum likelihood"
    doc.add(None, text=f"Linear mixed model fit by {method}\nFormula: {format_formula(fit.frame.formula)}")
    if fit.reml:
        head = Table(["AIC", "BIC", "logLik", "deviance", "REMLdev"],
                     [[fit.aic, fit.bic, fit.log_likelihood, fit.ml_deviance_at_estimate, fit.criterion]],
                     ["sig4"] * 5)
    else:
        head = Table(["AIC", "BIC", "logLik", "deviance"],
                     [[fit.aic, fit.bic, fit.log_likelihood, fit.criterion]], ["sig4"] * 4)
    doc.add(None, head)
    rows, vc_fields = _varcomp_rows(fit)
    doc.add("Random effects", Table(["Groups", "Name", "Variance", "Std.Dev.", "Corr"], rows,
                                    ["str", "str", "sig5", "sig5", "str"]))
    groups = "; ".join(f"{b.grouping}, {b.n_groups}" for b in
                       sorted(fit.frame.z_blocks, key=lambda b: -b.n_groups))
    doc.add(None, text=f"Number of obs: {fit.n_obs}, groups: {groups}")
    rows = [[fit.coefficients[k], fit.std_errors[k], fit.t_values[k]] for k in range(len(fit.labels))]
    doc.add("Fixed effects", Table(["Estimate", "Std. Error", "t value"], rows,
                                   ["sig5", "sig5", "sig4"], list(fit.labels)))
    p = len(fit.labels)
    if p > 1:
        short = [name[:6] for name in fit.labels]
        corr_rows = [[f"{fit.fixed_correlation[i, j]:.3f}" if j < i else "" for j in range(p - 1)]
                     for i in range(1, p)]
        doc.add("Correlation of Fixed Effects",
                Table(short[:-1], corr_rows, ["str"] * (p - 1), short[1:]))
    if fit.reml:
        doc.add(None, text=REML_CAVEAT)
    doc.fields = {
        "model": "lmm",
        "formula": format_formula(fit.frame.formula),
        "reml": fit.reml,
        "n_obs": fit.n_obs,
        "groups": {b.grouping: b.n_groups for b in fit.frame.z_blocks},
        "criterion": fit.criterion,
        "aic": fit.aic,
        "bic": fit.bic,
        "log_likelihood": fit.log_likelihood,
        "deviance": fit.ml_deviance_at_estimate if fit.reml else fit.criterion,
        "theta": list(fit.theta),
        "coefficients": _coef_fields(fit.labels, fit.coefficients, fit.std_errors, fit.t_values),
        "fixed_correlation": fit.fixed_correlation.tolist(),
        "varcomps": vc_fields,
        "warnings": list(fit.warnings),
    }
    return doc


def compare_report(lrt: LrtResult, alpha: float = 0.05) -> ReportDocument:
    doc = ReportDocument()
    doc.add(None, text=f"null: {lrt.null.formula}\nfull: {lrt.full.formula}")
    rows = [
        [lrt.null.n_params, lrt.null.aic, lrt.null.bic, lrt.null.log_likelihood, None, None, None, None],
        [lrt.full.n_params, lrt.full.aic, lrt.full.bic, lrt.full.log_likelihood,
         lrt.chisq, lrt.chi_df, lrt.p_value, lrt.p_value],
    ]
    doc.add(None, Table(["Df", "AIC", "BIC", "logLik", "Chisq", "Chi Df", "Pr(>Chisq)", ""], rows,
                        ["int", "sig5", "sig5", "sig5", "sig5", "int", "p4", "stars"], ["null", "full"]))
    if lrt.p_value < alpha:
        verdict = (f"The full model fits significantly better than the null model "
                   f"(chi-square {lrt.chisq:.4g} on {lrt.chi_df} df, p = {format_pvalue(lrt.p_value, 4)}).")
    else:
        verdict = (f"The full model does not fit significantly better than the null model "
                   f"(chi-square {lrt.chisq:.4g} on {lrt.chi_df} df, p = {format_pvalue(lrt.p_value, 4)}).")
    doc.add(None, text="---\n" + SIGNIF_CODES + "\n\n" + verdict)
    summary = lambda m: {"formula": m.formula, "df": m.n_params, "aic": m.aic, "bic": m.bic,
                         "log_likelihood": m.log_likelihood, "deviance": m.deviance}
    doc.fields = {"null": summary(lrt.null), "full": summary(lrt.full),
                  "lrt": {"chisq": lrt.chisq, "df": lrt.chi_df, "p": lrt.p_value},
                  "warnings": list(lrt.warnings)}
    return doc


# -- methods paragraph -------------------------------------------------------

def _join(items: list[str]) -> str:
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + " and " + items[-1]


def _effect_index(fit: LmmFit, effect_label: str) -> int:
    if effect_label in fit.labels:
        return fit.labels.index(effect_label)
    for term, cols in fit.frame.term_columns:
        if effect_label in term.variables and cols:
            return cols[0]
    raise KeyError(f"no fixed effect or variable named {effect_label!r}")


def writeup_generate(full_fit: LmmFit, lrt: LrtResult, effect_label: str,
                     group_labels: dict[str, str] | None = None, unit: str | None = None) -> str:
    """Methods paragraph for a likelihood-ratio comparison.

    ``effect_label`` names the tested coefficient (``"attitudepol"``) or its
    variable (``"attitude"``). ``group_labels`` maps grouping columns to the
    words used in the text, e.g. ``{"scenario": "item"}``. The estimate and
    standard error come from ``full_fit``.
    """
    group_labels = group_labels or {}
    ast = full_fit.frame.formula
    k = _effect_index(full_fit, effect_label)
    variable = next((t.variables[0] for t, cols in full_fit.frame.term_columns if k in cols),
                    effect_label)
    fixed = [t.label() for t in ast.fixed_terms if not t.is_intercept]
    groups = [group_labels.get(r.grouping, r.grouping) for r in ast.random_specs]
    slope_groups = [group_labels.get(r.grouping, r.grouping) for r in ast.random_specs
                    if r.slope_variables]
    slope_vars = sorted({v for r in ast.random_specs for v in r.slope_variables})

    random = f"intercepts for {_join(groups)}"
    if slope_groups:
        random += (f", as well as {_join([f'by-{g}' for g in slope_groups])} random slopes "
                   f"for the effect of {_join(slope_vars)}")
    est, se = float(full_fit.coefficients[k]), float(full_fit.std_errors[k])
    direction = "lowering" if est < 0 else "raising"
    u = f" {unit.strip()}" if unit and unit.strip() else ""
    p_text = format_pvalue(lrt.p_value, 2)
    return (
        f"We fitted a linear mixed-effects model of {ast.response} with mixlm. "
        f"The fixed effects were {_join(fixed) or 'an intercept only'}. "
        f"The random effects were {random}. "
        f"Residual plots were inspected for departures from homoscedasticity and normality. "
        f"Significance was assessed with likelihood ratio tests comparing the full model "
        f"against the same model without the effect in question. "
        f"{variable} affected {ast.response} (χ2({lrt.chi_df})={lrt.chisq:.2f}, p={p_text}), "
        f"{direction} it by about {abs(est):.3g}{u} ± {se:.2g} (standard errors)."
    )


# -- subcommands -------------------------------------------------------------

def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    df = read_csv(args.data)
    fit = _fit(df, args.formula, reml=not args.ml, mixed=args.mixed or args.ml or args.reml)
    if isinstance(fit, LmmFit):
        _emit_warnings(fit.warnings)
        doc = lmm_report(fit)
    else:
        doc = ols_report(fit)
    _write_output(doc.render(args.format), args.out)
    return EXIT_OK


def _parse_mapping(items) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ModelError(f"expected COLUMN=WORD, got {item!r}")
        k, v = item.split("=", 1)
        out[k] = v
    return out


def cmd_compare(args) -> int:
    if args.reml:
        print("warning: --reml ignored; likelihood ratio tests use maximum likelihood fits",
              file=sys.stderr)
    df = read_csv(args.data)
    null_frame, full_frame = _frame(df, args.null), _frame(df, args.full)
    null_fit = fit_lmm(null_frame, reml=False)
    full_fit = fit_lmm(full_frame, reml=False)
    _emit_warnings(null_fit.warnings + full_fit.warnings)
    lrt = lrt_compare(null_fit, full_fit)
    _emit_warnings(lrt.warnings)
    doc = compare_report(lrt)
    if args.effect:
        # Effect sizes are reported from the REML fit of the full model.
        reported = fit_lmm(full_frame, reml=True, start=full_fit.theta)
        paragraph = writeup_generate(reported, lrt, args.effect, _parse_mapping(args.group_label),
                                     args.unit)
        doc.add("Write-up", text=paragraph)
        doc.fields["writeup"] = paragraph
    _write_output(doc.render(args.format), args.out)
    return EXIT_OK


HINTS = {
    "collinearity": "correlated predictors: keep the most meaningful one, combine them, "
                    "or residualize one against the other.",
    "influence": "influential rows: report results with and without these rows, "
                 "and check them for data errors.",
    "visual": "inspect residuals.csv / qq.csv / hist.csv: a funnel or curve against fitted "
              "values suggests a transformation (for example log) or a missing predictor; "
              "heavy tails in the Q-Q data suggest non-normal errors.",
}


def _write_series(out: Path, name: str, series, svg: bool) -> None:
    (out / f"{name}.csv").write_text(series.to_csv(), encoding="utf-8")
    if svg:
        (out / f"{name}.svg").write_text(series_svg(series, name), encoding="utf-8")


def cmd_diagnose(args) -> int:
    df = read_csv(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    frame = _frame(df, args.formula)
    mixed = bool(frame.z_blocks) or args.mixed or args.ml or args.reml
    fit = fit_lmm(frame, reml=not args.ml) if mixed else fit_ols(frame)
    if isinstance(fit, LmmFit):
        _emit_warnings(fit.warnings)

    _write_series(out, "residuals", residual_fitted(fit), args.svg)
    _write_series(out, "qq", qq_points(fit), args.svg)
    _write_series(out, "hist", histogram_residuals(fit), args.svg)
    lines, flagged = [], set()

    if any(name != "(Intercept)" for name in frame.x_labels):
        coll = collinearity_report(frame, args.r_threshold, args.vif_threshold)
        (out / "collinearity.csv").write_text(coll.to_csv(), encoding="utf-8")
        for a, b, r, f in coll.pairs:
            if f:
                lines.append(f"collinearity: |r({a}, {b})| = {abs(r):.3f} >= {args.r_threshold}")
                flagged.add("collinearity")
        for a, v, f in coll.vif:
            if f:
                lines.append(f"collinearity: VIF({a}) = {v:.3g} >= {args.vif_threshold}")
                flagged.add("collinearity")
    else:
        (out / "collinearity.csv").write_text("kind,a,b,value,flagged\n", encoding="utf-8")

    if isinstance(fit, OlsFit):
        report = dfbeta_ols(frame, args.half_magnitude)
        (out / "dfbeta.csv").write_text(report.to_csv(), encoding="utf-8")
        flags = report.flags
    else:
        coefs = args.loo_coef or [name for name in frame.x_labels if name != "(Intercept)"]
        idx = [frame.x_labels.index(c) if c in frame.x_labels else None for c in coefs]
        for c, k in zip(coefs, idx):
            if k is None:
                raise KeyError(f"no fixed effect named {c!r}; have {', '.join(frame.x_labels)}")
        loo = np.column_stack([loo_fixed_effect(frame, fit.reml, c, workers=args.workers, full_fit=fit)
                               for c in coefs]) if coefs else np.empty((frame.n, 0))
        base = fit.coefficients[idx] if coefs else np.empty(0)
        csv = ["row," + ",".join(coefs)]
        for i, row in enumerate(loo, start=1):
            csv.append(f"{i}," + ",".join(repr(float(v)) for v in row))
        (out / "loo.csv").write_text("\n".join(csv) + "\n", encoding="utf-8")
        flags = influence_flags(base - loo, base, tuple(coefs), args.half_magnitude) if coefs else []
    for flag in flags:
        lines.append(f"influence: row {flag.row}, {flag.coefficient}: {flag.reason}")
        flagged.add("influence")

    summary = ["Diagnostics written to " + str(out)]
    summary += lines or ["no flags triggered"]
    summary += ["", "hints:"] + [f"- {HINTS[k]}" for k in sorted(flagged)] + [f"- {HINTS['visual']}"]
    text = "\n".join(summary) + "\n"
    (out / "summary.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_describe(args) -> int:
    df = read_csv(args.data)
    rows = []
    for col in df.columns:
        if col.is_numeric:
            vals = col.values[~col.missing]
            desc = f"numeric[{format_number(float(vals.min()))},{format_number(float(vals.max()))}]" \
                if vals.size else "numeric[]"
        else:
            desc = "categorical{" + ",".join(col.levels) + "}"
        rows.append([col.name, desc, int(col.missing.sum())])
    doc = ReportDocument()
    doc.add(f"{df.n_rows} rows, {len(df.columns)} columns",
            Table(["column", "type", "missing"], rows, ["str", "str", "int"]))
    miss = missing_report(df)
    by_col = {}
    for _, name in miss:
        by_col[name] = by_col.get(name, 0) + 1
    if miss:
        noun = "cell" if len(miss) == 1 else "cells"
        detail = ", ".join(f"{n}: {c}" if len(by_col) > 1 else n for n, c in by_col.items())
        text = f"{len(miss)} missing {noun} ({detail})\nrows: " + \
            ", ".join(f"{r} ({c})" for r, c in miss)
    else:
        text = "no missing cells"
    doc.add("Missing", text=text)
    fields = {"n_rows": df.n_rows,
              "columns": [{"name": r[0], "type": r[1], "missing": r[2]} for r in rows],
              "missing": [{"row": r, "column": c} for r, c in miss]}
    if args.group:
        response, by, factors = args.group
        if by.upper() != "BY":
            raise ModelError("--group expects RESPONSE BY F1,F2")
        factors = [f for f in factors.split(",") if f]
        stats = group_stats(df, response, factors)
        grows = [[*s.labels, s.n, s.min, s.q1, s.median, s.q3, s.max] for s in stats]
        doc.add(f"{response} by {', '.join(factors)}",
                Table([*factors, "n", "min", "q1", "median", "q3", "max"], grows,
                      ["str"] * len(factors) + ["int"] + ["sig5"] * 5))
        fields["groups"] = [{"levels": list(s.labels), "n": s.n, "min": s.min, "q1": s.q1,
                             "median": s.median, "q3": s.q3, "max": s.max} for s in stats]
    doc.fields = fields
    _write_output(doc.render(args.format), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < 1 or args.reps < 1:
        raise DataError("--n and --reps must be positive")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = Rng(args.seed)
    width = max(3, len(str(args.reps)))
    for rep in range(1, args.reps + 1):
        z = rng.normal(2 * args.n)
        x, y = z[: args.n], z[args.n:]
        lines = ["x,y"] + [f"{a!r},{b!r}" for a, b in zip(x.tolist(), y.tolist())]
        name = f"sim_{rep:0{width}d}"
        (out / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        if args.svg:
            (out / f"{name}.svg").write_text(scatter_svg(x, y, "x", "y", name), encoding="utf-8")
    print(f"wrote {args.reps} file(s) of {args.n} rows to {out}")
    return EXIT_OK


# -- argument parsing --------------------------------------------------------

def _add_method(p) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--reml", action="store_true", help="fit by REML (default for mixed models)")
    g.add_argument("--ml", action="store_true", help="fit by maximum likelihood")
    p.add_argument("--mixed", action="store_true",
                   help="require a mixed model; a formula without random terms is an error")


def _add_format(p) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixlm", description="Linear and linear mixed-effects models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model and print its summary")
    p.add_argument("--data", required=True)
    p.add_argument("--formula", required=True)
    _add_method(p)
    _add_format(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="likelihood ratio test of nested mixed models")
    p.add_argument("--data", required=True)
    p.add_argument("--null", required=True)
    p.add_argument("--full", required=True)
    p.add_argument("--reml", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--effect", help="coefficient or variable for the methods paragraph")
    p.add_argument("--group-label", action="append", metavar="COLUMN=WORD",
                   help="word for a grouping column in the paragraph, e.g. scenario=item")
    p.add_argument("--unit", help="unit of the response, e.g. Hz")
    _add_format(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("diagnose", help="write residual, influence and collinearity diagnostics")
    p.add_argument("--data", required=True)
    p.add_argument("--formula", required=True)
    _add_method(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    p.add_argument("--loo-coef", action="append", metavar="LABEL",
                   help="fixed effect to track in leave-one-out refits (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--r-threshold", type=float, default=0.8)
    p.add_argument("--vif-threshold", type=float, default=5.0)
    p.add_argument("--half-magnitude", type=float, default=0.5)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("describe", help="column inventory, missing cells and group summaries")
    p.add_argument("--data", required=True)
    p.add_argument("--group", nargs=3, metavar=("RESPONSE", "BY", "FACTORS"))
    _add_format(p)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("simulate", help="write seeded standard-normal (x, y) samples")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except (MixlmError, OSError, KeyError, IndexError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
