"""Run-level availability metrics."""

from __future__ import annotations

from .world import UP, ClusterWorld


def availability_report(world: ClusterWorld) -> dict:
    total_ticks = max(world.clock, 1)
    submitted = world.submitted_count
    committed_fraction = (world.committed_count / submitted) if submitted else 1.0
    return {
        "submitted_txs": submitted,
        "committed_txs": world.committed_count,
        "committed_fraction": committed_fraction,
        "stall_ticks": world.stall_ticks,
        "total_ticks": world.clock,
        "chain_height": world.ledger.height,
        "tip_hash": world.ledger.tip_hash,
        "per_node_uptime": {
            node_id: node.up_ticks / total_ticks for node_id, node in sorted(world.nodes.items())
        },
        "up_nodes": sorted(n.node_id for n in world.nodes.values() if n.status == UP),
    }
