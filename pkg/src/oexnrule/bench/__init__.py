"""Repeated-split benchmark harness and report writers."""

from .experiment import DatasetSpec, ExperimentConfig, ExperimentReport, run_experiment
from .report import emit_boxplot_data, emit_report

__all__ = ["DatasetSpec", "ExperimentConfig", "ExperimentReport", "run_experiment", "emit_report",
           "emit_boxplot_data"]
