"""Cluster sizing and round scheduling parameters."""

from __future__ import annotations

from dataclasses import dataclass, field


def majority(n_nodes: int) -> int:
    return n_nodes // 2 + 1


@dataclass(frozen=True, slots=True)
class QuorumConfig:
    n_nodes: int
    quorum: int = 0
    leader_rotation: int = 1
    vote_timeout_ticks: int = 20
    batch_size: int = 1

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be at least 1")
        if self.quorum == 0:
            object.__setattr__(self, "quorum", majority(self.n_nodes))
        if not 1 <= self.quorum <= self.n_nodes:
            raise ValueError(f"quorum {self.quorum} outside 1..{self.n_nodes}")
        if self.leader_rotation < 1:
            raise ValueError("leader_rotation must be at least 1")


def leader_for(height: int, attempt: int, config: QuorumConfig) -> str:
    """Round-robin leader by height, shifted on each failed attempt."""
    index = ((height - 1) // config.leader_rotation + attempt) % config.n_nodes
    return f"node-{index}"
