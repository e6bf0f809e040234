"""Linear models and linear mixed-effects models from model formulas."""
from .dataframe import Column, DataFrame, read_csv, write_csv
from .design import ModelFrame, build_model_frame
from .errors import (ColumnTypeError, ConvergenceError, DataError, DomainError, FormulaError,
                     MixlmError, ModelError, NoRandomEffectsError, SingularDesignError)
from .formula import format_formula, parse_formula
from .inference import LrtResult, lrt_compare
from .kernels import BACKEND
from .lmm import LmmFit, coef_by_group, fit_lmm, profiled_objective
from .ols import OlsFit, fit_ols, predict_ols

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Column", "ColumnTypeError", "ConvergenceError", "DataError", "DataFrame",
    "DomainError", "FormulaError", "LmmFit", "LrtResult", "MixlmError", "ModelError",
    "ModelFrame", "NoRandomEffectsError", "OlsFit", "SingularDesignError", "build_model_frame",
    "coef_by_group", "fit_lmm", "fit_ols", "format_formula", "lrt_compare", "parse_formula",
    "predict_ols", "profiled_objective", "read_csv", "write_csv",
]
