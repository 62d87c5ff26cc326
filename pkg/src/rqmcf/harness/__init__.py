"""Experiment configuration, runners and reporting."""

from .config import ExperimentConfig, build_config, read_config_file
from .experiments import (
    RunResult,
    fit_loglog_slope,
    run_approx_error,
    run_experiment,
    run_krr_bench,
)
from .report import CSV_HEADER, ResultRecord, records_to_csv, write_csv, write_metadata
from .targets import TargetFunction, calibrate, calibrated, target_r05, target_r1

__all__ = [
    "CSV_HEADER",
    "ExperimentConfig",
    "ResultRecord",
    "RunResult",
    "TargetFunction",
    "build_config",
    "calibrate",
    "calibrated",
    "fit_loglog_slope",
    "read_config_file",
    "records_to_csv",
    "run_approx_error",
    "run_experiment",
    "run_krr_bench",
    "target_r05",
    "target_r1",
    "write_csv",
    "write_metadata",
]
