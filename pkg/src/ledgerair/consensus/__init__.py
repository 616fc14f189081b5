"""Quorum-vote block commitment over a deterministic simulated network."""

from .config import QuorumConfig, leader_for
from .faults import CrashNode, DropMessage, Partition, RestartNode, parse_fault_plan
from .messages import CommitMsg, Envelope, Propose, VoteMsg
from .report import availability_report
from .world import ClusterWorld, run_until_quiescent, tally_votes, validate_proposal

__all__ = [
    "QuorumConfig",
    "leader_for",
    "CrashNode",
    "DropMessage",
    "Partition",
    "RestartNode",
    "parse_fault_plan",
    "CommitMsg",
    "Envelope",
    "Propose",
    "VoteMsg",
    "availability_report",
    "ClusterWorld",
    "run_until_quiescent",
    "tally_votes",
    "validate_proposal",
]
