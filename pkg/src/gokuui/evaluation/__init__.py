"""Metrics, evaluation, sweeps, reports and figures."""
from .evaluate import evaluate, evaluation_windows
from .metrics import nrmse
from .plots import emit_plots
from .report import MetricsReport, aggregate, emit_report, load_report

__all__ = [
    "MetricsReport",
    "aggregate",
    "emit_plots",
    "emit_report",
    "evaluate",
    "evaluation_windows",
    "load_report",
    "nrmse",
]
