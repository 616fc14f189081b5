"""Command-line interface.

Subcommands:
  run      execute a scenario and write report, CSV, figures, and chain log
  compare  run a compare-mode scenario and print baseline vs ledger numbers
  tamper   flip one byte inside a stored block of a chain log
  verify   check an on-disk chain log against its key sidecar
  serve    expose a live system over the HTTP API
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CorruptLog, LedgerAirError
from .harness.run import run_scenario, write_artifacts
from .harness.scenario import SHIPPED_SCENARIOS, load_scenario
from .harness.tamper import tamper_log
from .ledger.chain import verify_chain
from .ledger.store import keys_sidecar, load_chain, load_keys


def _print_run_summary(report: dict, paths: dict | None) -> None:
    scenario = report["scenario"]
    availability = report["availability"]
    chain = report["chain"]
    print(f"scenario: {scenario['name']} (mode={scenario['mode']}, seed={scenario['seed']})")
    print(
        "committed: "
        f"{availability['committed_txs']}/{availability['submitted_txs']} "
        f"(fraction={availability['committed_fraction']:.6f}, "
        f"stall_ticks={availability['stall_ticks']}, total_ticks={availability['total_ticks']})"
    )
    print(f"chain: height={chain['height']} verified={chain['verified']} tip={chain['tip_hash'][:16]}…")
    print(f"workload: {report['workload']}")
    print(
        f"money: captured={report['money']['captured_total']} "
        f"refunded={report['money']['refunded_total']} conserved={report['money']['conserved']}"
    )
    print(f"divergence: {report['divergence']['mismatches']} mismatches")
    if "comparison" in report:
        comparison = report["comparison"]
        print(
            f"baseline: {report['baseline']['mismatches']} mismatches, "
            f"mean cycle {report['baseline']['mean_cycle_ticks']:.1f} ticks"
        )
        print(
            f"reduction: mismatches {comparison['mismatch_reduction']:.1%}, "
            f"cycle time {comparison['cycle_reduction']:.1%}"
        )
    if paths:
        figures = ", ".join(str(p) for p in paths["figures"])
        print(f"artifacts: {paths['report']} {paths['csv']} {paths['log']}")
        print(f"figures: {figures}")


def cmd_run(args: argparse.Namespace) -> int:
    report, system = run_scenario(args.scenario)
    paths = write_artifacts(report, system, args.out) if args.out else None
    _print_run_summary(report, paths)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.mode != "compare":
        print(f"error: scenario {scenario.name!r} has mode {scenario.mode!r}, expected 'compare'")
        return 2
    report, system = run_scenario(scenario)
    paths = write_artifacts(report, system, args.out) if args.out else None
    _print_run_summary(report, paths)
    return 0


def cmd_tamper(args: argparse.Namespace) -> int:
    result = tamper_log(args.log, args.height, args.offset, args.out)
    print(
        f"flipped byte at height={result['height']} offset={result['offset']} "
        f"(file position {result['file_position']}): "
        f"0x{result['original']:02x} -> 0x{result['mutated']:02x}"
    )
    print(f"wrote {result['path']}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    keys_path = Path(args.keys) if args.keys else keys_sidecar(args.log)
    try:
        chain = load_chain(args.log)
        keyring, quorum = load_keys(keys_path)
    except CorruptLog as exc:
        print(f"corrupt log: {exc}")
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}")
        return 2
    verdict = verify_chain(chain, keyring, quorum)
    if verdict.ok:
        print(f"Valid: height={chain.height} tip={chain.tip_hash}")
        return 0
    detail = f" ({verdict.detail})" if verdict.detail else ""
    print(f"Invalid at height {verdict.height}: {verdict.reason}{detail}")
    return 1


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .gateway.app import create_app
    from .harness.system import build_system, run_workload

    scenario = load_scenario(args.scenario)
    system = build_system(scenario)
    if args.with_workload:
        run_workload(system, scenario)
        system.settle_cluster()
    app = create_app(system)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ledgerair",
        description="Replicated reservation ledger simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    shipped = ", ".join(SHIPPED_SCENARIOS)
    run_p = sub.add_parser("run", help="execute a scenario")
    run_p.add_argument("scenario", help=f"scenario JSON path or shipped name ({shipped})")
    run_p.add_argument("--out", help="directory for report, CSV, figures, and chain log")
    run_p.set_defaults(fn=cmd_run)

    compare_p = sub.add_parser("compare", help="run a compare-mode scenario")
    compare_p.add_argument("scenario", help="compare-mode scenario JSON path or shipped name")
    compare_p.add_argument("--out", help="directory for artifacts")
    compare_p.set_defaults(fn=cmd_compare)

    tamper_p = sub.add_parser("tamper", help="flip one byte in a stored block")
    tamper_p.add_argument("log", help="chain log path")
    tamper_p.add_argument("--height", type=int, required=True)
    tamper_p.add_argument("--offset", type=int, required=True)
    tamper_p.add_argument("--out", help="write the mutated log here instead of in place")
    tamper_p.set_defaults(fn=cmd_tamper)

    verify_p = sub.add_parser("verify", help="verify a chain log")
    verify_p.add_argument("log", help="chain log path")
    verify_p.add_argument("--keys", help="key sidecar path (default: <log>.keys.json)")
    verify_p.set_defaults(fn=cmd_verify)

    serve_p = sub.add_parser("serve", help="serve the HTTP API over a live system")
    serve_p.add_argument("--scenario", default="smoke")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument(
        "--with-workload", action="store_true", help="replay the scenario workload before serving"
    )
    serve_p.set_defaults(fn=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except LedgerAirError as exc:
        print(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
