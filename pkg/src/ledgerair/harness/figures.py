"""Figure rendering for run reports.

Matplotlib is imported lazily with the Agg backend so report generation
works headless and tests that never render stay fast.
"""

from __future__ import annotations

from pathlib import Path

OUTCOME_KEYS = ("confirmed", "rejected", "cancelled", "refunded", "reviews", "pending")


def render_figures(report: dict, outdir: str | Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []

    uptime = report["availability"]["per_node_uptime"]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar(list(uptime), list(uptime.values()), color="#2a6f97")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("uptime fraction")
    ax.set_title(f"Per-node uptime ({report['scenario']['name']})")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    target = outdir / "uptime.png"
    fig.savefig(target, dpi=120)
    plt.close(fig)
    paths.append(target)

    counters = report["workload"]
    values = [counters.get(k, 0) for k in OUTCOME_KEYS]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar(OUTCOME_KEYS, values, color="#52796f")
    ax.set_ylabel("operations")
    ax.set_title("Workload outcomes")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    target = outdir / "workload.png"
    fig.savefig(target, dpi=120)
    plt.close(fig)
    paths.append(target)

    if "baseline" in report:
        labels = ["record mismatches", "mean cycle (ticks)"]
        baseline_vals = [
            report["baseline"]["mismatches"],
            report["baseline"]["mean_cycle_ticks"],
        ]
        ledger_vals = [
            report["divergence"]["mismatches"],
            report["cycle"]["mean_ticks"],
        ]
        x = range(len(labels))
        width = 0.38
        fig, ax = plt.subplots(figsize=(6.4, 3.6))
        ax.bar([i - width / 2 for i in x], baseline_vals, width, label="baseline", color="#9d4edd")
        ax.bar([i + width / 2 for i in x], ledger_vals, width, label="ledger", color="#2a6f97")
        ax.set_xticks(list(x))
        ax.set_xticklabels(labels)
        ax.set_title("Baseline vs ledger")
        ax.legend()
        fig.tight_layout()
        target = outdir / "comparison.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        paths.append(target)

    return paths
