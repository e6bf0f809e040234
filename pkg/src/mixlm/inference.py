"""Likelihood-ratio comparison of nested mixed models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .lmm import LmmFit
from .numstat import chisq_upper_p

CLAMP = 1e-6


@dataclass(frozen=True)
class ModelSummary:
    formula: str
    n_params: int
    aic: float
    bic: float
    log_likelihood: float
    deviance: float

    @classmethod
    def of(cls, fit: LmmFit) -> "ModelSummary":
        return cls(str(fit.frame.formula), fit.n_params, fit.aic, fit.bic,
                   fit.log_likelihood, fit.criterion)


@dataclass(frozen=True)
class LrtResult:
    null: ModelSummary
    full: ModelSummary
    chisq: float
    chi_df: int
    p_value: float
    warnings: tuple[str, ...] = ()


def _random_structure(fit: LmmFit):
    return tuple((b.grouping, b.column_names) for b in fit.frame.z_blocks)


def lrt_compare(null_fit: LmmFit, full_fit: LmmFit) -> LrtResult:
    """Chi-square test of ``full_fit`` against the nested ``null_fit``.

    Both fits must be maximum likelihood, use the same rows and the same
    random-effects structure, and the null model must have fewer
    parameters. Differences in [-1e-6, 0) are treated as optimizer slack
    and reported as zero with p = 1.
    """
    if null_fit.reml or full_fit.reml:
        raise ModelError("likelihood ratio test requires ML fits (refit with reml=False)")
    if null_fit.n_obs != full_fit.n_obs:
        raise ModelError(f"models use different numbers of observations "
                         f"({null_fit.n_obs} vs {full_fit.n_obs})")
    if not np.array_equal(null_fit.frame.kept_rows, full_fit.frame.kept_rows):
        raise ModelError("models were fitted to different rows")
    if _random_structure(null_fit) != _random_structure(full_fit):
        raise ModelError("models must share the same random-effects structure")
    if null_fit.n_params == full_fit.n_params:
        raise ModelError("models have equal parameter counts; nothing to test")
    if null_fit.n_params > full_fit.n_params:
        raise ModelError("the null model has more parameters than the full model; "
                         "pass the smaller model first")

    warnings = []
    null_terms = set(null_fit.frame.formula.fixed_terms)
    full_terms = set(full_fit.frame.formula.fixed_terms)
    if not null_terms <= full_terms:
        warnings.append("fixed terms of the null model are not a subset of the full model's; "
                        "the models may not be nested")

    chisq = null_fit.criterion - full_fit.criterion
    df = full_fit.n_params - null_fit.n_params
    if chisq < -CLAMP:
        raise ModelError(f"full model deviance exceeds the null model's by {-chisq:.3g}; "
                         "the models are not nested or an optimizer stalled")
    if chisq < 0:
        chisq, p = 0.0, 1.0
    else:
        p = chisq_upper_p(chisq, df)
    return LrtResult(ModelSummary.of(null_fit), ModelSummary.of(full_fit), chisq, df, p,
                     tuple(warnings))
