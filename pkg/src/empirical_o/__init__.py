"""Empirical complexity estimation for an instrumented quicksort.

Generate distribution-controlled inputs, measure operation counts or wall
time, fit growth models by ordinary least squares with full diagnostics and
label the resulting curve.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (DiagnosticsUndefinedError, EmpiricalOError, InvalidPairingError, InvalidParameterError,
                     PreconditionError, SingularDesignError, TableFormatError)
from .harness import (HeavyTail, ResponseRow, ResponseTable, TieDensity, UniformK, WallTime, WeightedCount,
                      WorkloadSpec, run_experiment, sweep_k)
from .pipeline import ExperimentConfig, end_to_end
from .sortlab import OperationCounts, WeightVector, count_operations, quicksort_instrumented, weighted_cost
from .statfit import FULL, NLOGN_MODEL, RegressionFit, TermSet, fit_ols, residual_report
from .verdict import ComplexityVerdict, Label, SelectionPolicy, classify, conjecture1_check, detect_pseudo_linear, select_model
from .workloads import gen_heavy_tail, gen_tied, gen_uniform

__all__ = [
    "ComplexityVerdict", "DiagnosticsUndefinedError", "EmpiricalOError", "ExperimentConfig", "FULL", "HeavyTail",
    "InvalidPairingError", "InvalidParameterError", "Label", "NLOGN_MODEL", "OperationCounts", "PreconditionError",
    "RegressionFit", "ResponseRow", "ResponseTable", "SelectionPolicy", "SingularDesignError", "TableFormatError",
    "TermSet", "TieDensity", "UniformK", "WallTime", "WeightVector", "WeightedCount", "WorkloadSpec", "classify",
    "conjecture1_check", "count_operations", "detect_pseudo_linear", "end_to_end", "fit_ols", "gen_heavy_tail",
    "gen_tied", "gen_uniform", "quicksort_instrumented", "residual_report", "run_experiment", "select_model",
    "sweep_k", "weighted_cost",
]
