"""Scenario harness tests: parsing, frozen reports, artifacts, tampering, CLI."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from ledgerair.cli import main
from ledgerair.errors import OffsetOutOfRange, ScenarioParseError
from ledgerair.harness import (
    block_sizes,
    canonical_json,
    load_scenario,
    parse_scenario,
    run_scenario,
    tamper_log,
    write_artifacts,
)
from ledgerair.ledger import load_chain, load_keys, verify_chain

MINIMAL = {
    "name": "mini",
    "seed": "mini-1",
    "cluster": {"n_nodes": 4},
    "flights": [
        {
            "flight": "BG-147",
            "route": "DAC-CGP",
            "departure_time": 100000,
            "capacity": 5,
            "fare": 10000,
        }
    ],
    "workload": {"bookings": 3},
}


# -- scenario parsing ---------------------------------------------------------


def test_parse_minimal_scenario_defaults():
    scenario = parse_scenario(dict(MINIMAL))
    assert scenario.mode == "ledger"
    assert scenario.workload.customers == 8
    assert scenario.payment_script == ("ok",)
    assert scenario.baseline.drop_rate == 0.1
    assert scenario.fault_plan == ()


def test_parse_rejects_missing_key():
    doc = dict(MINIMAL)
    del doc["seed"]
    with pytest.raises(ScenarioParseError, match="seed"):
        parse_scenario(doc)


def test_parse_rejects_unknown_key():
    with pytest.raises(ScenarioParseError, match="unexpected"):
        parse_scenario({**MINIMAL, "unexpected_knob": 1})


def test_parse_rejects_bad_mode():
    with pytest.raises(ScenarioParseError, match="mode"):
        parse_scenario({**MINIMAL, "mode": "hybrid"})


def test_parse_rejects_bad_cluster_key():
    with pytest.raises(ScenarioParseError):
        parse_scenario({**MINIMAL, "cluster": {"n_nodes": 4, "warp": 9}})


def test_parse_rejects_empty_workload():
    with pytest.raises(ScenarioParseError):
        parse_scenario({**MINIMAL, "workload": {"bookings": 0}})


def test_parse_rejects_bad_flight():
    flights = [{"flight": "X", "route": "A-B"}]
    with pytest.raises(ScenarioParseError):
        parse_scenario({**MINIMAL, "flights": flights})


def test_load_scenario_by_shipped_name_and_path(tmp_path):
    by_name = load_scenario("smoke")
    assert by_name.name == "smoke"
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(MINIMAL))
    by_path = load_scenario(path)
    assert by_path.name == "mini"
    with pytest.raises(ScenarioParseError):
        load_scenario("no-such-scenario")


def test_all_shipped_scenarios_parse():
    for name in ("smoke", "faults", "compare", "overbook"):
        scenario = load_scenario(name)
        assert scenario.name == name


# -- frozen smoke report ------------------------------------------------------


def test_smoke_report_frozen_values():
    report, system = run_scenario("smoke")
    assert report["chain"] == {
        "height": 32,
        "reason": "",
        "tip_hash": "5331aec54d6042cf6abb2ca8c4ff6f73068bc78cf5446a9f2df0717f2ea3f3d2",
        "verified": True,
    }
    assert report["workload"] == {
        "attempted": 12,
        "cancelled": 3,
        "confirmed": 11,
        "pending": 0,
        "refunded": 3,
        "rejected": 1,
        "reviews": 2,
    }
    assert report["money"] == {
        "captured_total": 108000,
        "conserved": True,
        "refunded_total": 22400,
    }
    assert report["divergence"] == {"mismatches": 0, "affected_pnrs": 0}
    assert report["availability"]["committed_fraction"] == 1.0
    assert report["availability"]["stall_ticks"] == 0
    assert report["cycle"] == {"count": 11, "mean_ticks": 20.0}
    assert report["safety_violations"] == 0
    assert system.world.ledger.height == 32


def test_smoke_report_binary_deterministic():
    first, _ = run_scenario("smoke")
    second, _ = run_scenario("smoke")
    assert canonical_json(first) == canonical_json(second)
    assert canonical_json(first).endswith("\n")


def test_compare_report_frozen_values():
    report, _ = run_scenario("compare")
    assert report["baseline"] == {
        "affected_pnrs": 8,
        "bookings": 40,
        "confirmed": 27,
        "dropped_messages": 13,
        "mean_cycle_ticks": 48.0,
        "mismatches": 8,
    }
    assert report["comparison"]["mismatch_reduction"] == 1.0
    assert round(report["comparison"]["cycle_reduction"], 6) == 0.583333
    assert report["divergence"]["mismatches"] == 0


# -- artifacts ----------------------------------------------------------------


@pytest.fixture(scope="module")
def smoke_artifacts(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("smoke-run")
    report, system = run_scenario("smoke", outdir=outdir)
    return outdir, report, system


def test_artifacts_written(smoke_artifacts):
    outdir, report, _ = smoke_artifacts
    assert (outdir / "report.json").exists()
    assert (outdir / "metrics.csv").exists()
    assert (outdir / "chain.log").exists()
    assert (outdir / "chain.log.keys.json").exists()
    assert (outdir / "uptime.png").stat().st_size > 0
    assert (outdir / "workload.png").stat().st_size > 0
    on_disk = json.loads((outdir / "report.json").read_text())
    assert on_disk == json.loads(canonical_json(report))


def test_metrics_csv_flattens_report(smoke_artifacts):
    outdir, report, _ = smoke_artifacts
    with open(outdir / "metrics.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["metric", "value"]
    table = dict(rows[1:])
    assert table["chain.height"] == "32"
    assert table["workload.confirmed"] == "11"
    assert table["money.conserved"] == "True"
    assert (
        table["chain.tip_hash"]
        == "5331aec54d6042cf6abb2ca8c4ff6f73068bc78cf5446a9f2df0717f2ea3f3d2"
    )


def test_persisted_chain_round_trips(smoke_artifacts):
    outdir, report, _ = smoke_artifacts
    chain = load_chain(outdir / "chain.log")
    keyring, quorum = load_keys(outdir / "chain.log.keys.json")
    verdict = verify_chain(chain, keyring, quorum)
    assert verdict.ok
    assert chain.height == report["chain"]["height"]
    assert chain.tip_hash == report["chain"]["tip_hash"]


def test_comparison_figure_only_in_compare_mode(tmp_path):
    report, system = run_scenario("compare", outdir=tmp_path)
    assert (tmp_path / "comparison.png").exists()


# -- tampering ----------------------------------------------------------------


def test_tamper_flips_one_byte_and_breaks_verification(smoke_artifacts):
    outdir, _, _ = smoke_artifacts
    log = outdir / "chain.log"
    tampered = outdir / "tampered.log"
    info = tamper_log(log, height=5, offset=100, out_path=tampered)
    assert info["mutated"] == info["original"] ^ 0xFF
    chain = load_chain(tampered)
    keyring, quorum = load_keys(outdir / "chain.log.keys.json")
    verdict = verify_chain(chain, keyring, quorum)
    assert not verdict.ok
    assert verdict.height == 5

    # the original is untouched
    untouched = verify_chain(load_chain(log), keyring, quorum)
    assert untouched.ok


def test_tamper_rejects_out_of_range(smoke_artifacts):
    outdir, _, _ = smoke_artifacts
    log = outdir / "chain.log"
    with pytest.raises(OffsetOutOfRange, match="height"):
        tamper_log(log, height=999, offset=0)
    with pytest.raises(OffsetOutOfRange, match="offset"):
        tamper_log(log, height=1, offset=10_000_000)


def test_block_sizes_match_frame_count(smoke_artifacts):
    outdir, report, _ = smoke_artifacts
    sizes = block_sizes(outdir / "chain.log")
    assert len(sizes) == report["chain"]["height"]
    assert all(size > 0 for size in sizes)


# -- CLI ----------------------------------------------------------------------


def test_cli_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "art"
    assert main(["run", "smoke", "--out", str(out)]) == 0
    assert (out / "report.json").exists()
    stdout = capsys.readouterr().out
    assert "height=32" in stdout


def test_cli_verify_round_trip(tmp_path, capsys):
    out = tmp_path / "art"
    main(["run", "smoke", "--out", str(out)])
    log = str(out / "chain.log")

    assert main(["verify", log]) == 0
    assert "Valid" in capsys.readouterr().out

    assert main(["tamper", log, "--height", "3", "--offset", "50"]) == 0
    capsys.readouterr()
    assert main(["verify", log]) == 1
    assert "Invalid at height 3" in capsys.readouterr().out


def test_cli_compare_requires_compare_scenario(tmp_path):
    assert main(["compare", "smoke", "--out", str(tmp_path / "x")]) == 2


def test_cli_unknown_scenario_is_error():
    assert main(["run", "definitely-not-a-scenario"]) == 2


def test_cli_verify_missing_file_is_error(tmp_path):
    assert main(["verify", str(tmp_path / "none.log")]) == 2
