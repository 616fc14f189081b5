"""Scenario execution and artifact generation.

A run yields one report dict, serialized canonically (sorted keys,
floats rounded to 6 places) so repeated runs of the same scenario are
byte-identical. Artifacts written next to the report: metrics.csv, the
rendered figures, and the persisted chain with its key sidecar.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..consensus.report import availability_report
from ..ledger.store import keys_sidecar, persist_chain, save_keys
from ..services.baseline import divergence_report, ledger_views
from ..services.reservations import ReservationSystem
from .figures import render_figures
from .scenario import Scenario, load_scenario
from .system import build_baseline, build_system, run_baseline_workload, run_workload


def _round_floats(value):
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_round_floats(v) for v in value]
    return value


def canonical_json(report: dict) -> str:
    return json.dumps(_round_floats(report), sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], rows)
    elif isinstance(value, (str, int, float, bool)):
        rows.append((prefix, str(value)))
    elif isinstance(value, list) and all(isinstance(v, (str, int, float, bool)) for v in value):
        rows.append((prefix, ";".join(str(v) for v in value)))


def write_metrics_csv(report: dict, path: str | Path) -> Path:
    path = Path(path)
    rows: list[tuple[str, str]] = []
    _flatten("", _round_floats(report), rows)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        writer.writerows(rows)
    return path


def build_report(
    scenario: Scenario,
    system: ReservationSystem,
    workload: dict,
    baseline_report: dict | None = None,
) -> dict:
    verdict = system.verify()
    divergence = divergence_report(ledger_views(system))
    cycles = system.cycle_ticks
    mean_cycle = sum(cycles) / len(cycles) if cycles else 0.0
    captured_total = sum(system.payments_view.captured_by_pnr.values())
    refunded_total = sum(system.payments_view.refunded_by_pnr.values())
    report = {
        "scenario": {
            "name": scenario.name,
            "seed": scenario.seed,
            "mode": scenario.mode,
            "n_nodes": scenario.cluster.n_nodes,
            "quorum": scenario.cluster.quorum,
            "batch_size": scenario.cluster.batch_size,
        },
        "availability": availability_report(system.world),
        "workload": {"attempted": len(workload["outcomes"]), **workload["counters"]},
        "chain": {
            "height": system.world.ledger.height,
            "tip_hash": system.world.ledger.tip_hash,
            "verified": verdict.ok,
            "reason": verdict.reason or "",
        },
        "divergence": {
            "mismatches": divergence["mismatches"],
            "affected_pnrs": len(divergence["affected_pnrs"]),
        },
        "money": {
            "captured_total": captured_total,
            "refunded_total": refunded_total,
            "conserved": system.payments_view.conserved(),
        },
        "cycle": {"mean_ticks": mean_cycle, "count": len(cycles)},
        "notifications": system.notifier.count(),
        "safety_violations": len(system.world.safety_violations),
    }
    if baseline_report is not None:
        report["baseline"] = baseline_report
        base_m = baseline_report["mismatches"]
        ledger_m = divergence["mismatches"]
        base_cycle = baseline_report["mean_cycle_ticks"]
        report["comparison"] = {
            "mismatch_reduction": 1.0 if base_m == 0 and ledger_m == 0 else (base_m - ledger_m) / base_m,
            "cycle_reduction": (base_cycle - mean_cycle) / base_cycle if base_cycle else 0.0,
        }
    return report


def run_scenario(source: str | Path | Scenario, outdir: str | Path | None = None):
    """Execute a scenario; returns (report, system) and writes artifacts."""
    scenario = source if isinstance(source, Scenario) else load_scenario(source)
    system = build_system(scenario)
    workload = run_workload(system, scenario)
    system.settle_cluster()
    baseline_report = None
    if scenario.mode == "compare":
        baseline = build_baseline(scenario)
        baseline_report = run_baseline_workload(baseline, scenario)
    report = build_report(scenario, system, workload, baseline_report)
    if outdir is not None:
        write_artifacts(report, system, outdir)
    return report, system


def write_artifacts(report: dict, system: ReservationSystem, outdir: str | Path) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    report_path = outdir / "report.json"
    report_path.write_text(canonical_json(report))
    csv_path = write_metrics_csv(report, outdir / "metrics.csv")
    figure_paths = render_figures(report, outdir)
    log_path = outdir / "chain.log"
    persist_chain(system.world.ledger, log_path)
    save_keys(keys_sidecar(log_path), system.world.keyring, system.world.config.quorum)
    return {
        "report": report_path,
        "csv": csv_path,
        "figures": figure_paths,
        "log": log_path,
        "keys": keys_sidecar(log_path),
    }
