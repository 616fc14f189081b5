"""Scenario-driven simulation harness: runs, reports, figures, tampering."""

from .run import build_report, canonical_json, run_scenario, write_artifacts, write_metrics_csv
from .scenario import (
    SHIPPED_SCENARIOS,
    BaselineSpec,
    Scenario,
    WorkloadSpec,
    load_scenario,
    parse_scenario,
)
from .system import build_baseline, build_system, run_baseline_workload, run_workload
from .tamper import block_sizes, tamper_log

__all__ = [
    "BaselineSpec",
    "SHIPPED_SCENARIOS",
    "Scenario",
    "WorkloadSpec",
    "block_sizes",
    "build_baseline",
    "build_report",
    "build_system",
    "canonical_json",
    "load_scenario",
    "parse_scenario",
    "run_baseline_workload",
    "run_scenario",
    "run_workload",
    "tamper_log",
    "write_artifacts",
    "write_metrics_csv",
]
