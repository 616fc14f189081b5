"""The deterministic cluster simulation.

One step processes exactly one event and advances the clock one tick:
a due crash/restart fault first, else the head of the FIFO message queue,
else one housekeeping action (round timeout, replica catch-up, or round
initiation). Event handlers are atomic, faults apply only between steps,
and there is no hidden randomness, so the final world is a pure function
of (config, seed, submissions, fault plan).

Commit protocol per height: the designated leader seals a block from the
backlog, broadcasts Propose, and counts signed votes (its own included).
Reaching quorum accepts commits: the block, with the collected votes
recorded, is appended to the leader replica and the driver ledger and
Commit messages fan out. A timeout or unreachable quorum aborts the round
and returns its transactions to the backlog for the next attempt under a
rotated leader.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field, replace

from ..errors import (
    BadSignature,
    DuplicateTransaction,
    EmptyPool,
    LeaderCrashed,
    MixedBlockHash,
    NotLeader,
    UnknownNode,
)
from ..keys import KeyRing, Signer, bootstrap_keyring
from ..ledger.blocks import (
    Block,
    Vote,
    compute_block_hash,
    compute_tx_digest,
    make_block,
    make_vote,
    with_votes,
)
from ..ledger.chain import Chain
from ..ledger.chain import verify_chain as verify_replica
from ..ledger.records import TransactionRecord, transaction_body
from .config import QuorumConfig, leader_for
from .faults import CrashNode, DropMessage, Fault, Partition, RestartNode
from .messages import CommitMsg, Envelope, Propose, VoteMsg, check_message, make_commit, make_propose

UP = "Up"
CRASHED = "Crashed"


@dataclass(slots=True)
class NodeState:
    node_id: str
    chain: Chain
    status: str = UP
    up_ticks: int = 0


@dataclass(slots=True)
class RoundState:
    height: int
    attempt: int
    leader: str
    block: Block
    started: int
    votes: dict[str, Vote] = field(default_factory=dict)
    reasons: dict[str, str] = field(default_factory=dict)


def validate_proposal(node: NodeState, block: Block, keyring: KeyRing) -> tuple[bool, str]:
    """A voter's acceptance check against its own replica."""
    if block.height != node.chain.height + 1:
        return False, "HeightGap"
    if block.prev_hash != node.chain.tip_hash:
        return False, "ForkMismatch"
    if compute_tx_digest(block.transactions) != block.tx_digest:
        return False, "HashMismatch"
    recomputed = compute_block_hash(
        block.height, block.prev_hash, block.tx_digest, block.proposer, block.logical_time
    )
    if recomputed != block.block_hash:
        return False, "HashMismatch"
    for tx in block.transactions:
        body = transaction_body(tx)
        if hashlib.sha256(body).hexdigest() != tx.tx_id:
            return False, "HashMismatch"
        if not keyring.check(tx.author, body, tx.signature):
            return False, "BadSignature"
        if node.chain.has_committed(tx.tx_id):
            return False, "DuplicateTransaction"
    return True, ""


def tally_votes(votes: list[VoteMsg], quorum: int, n_nodes: int) -> str:
    """Classify a vote set for one height: Committed, Pending, or Aborted."""
    hashes = {v.block_hash for v in votes}
    if len(hashes) > 1:
        raise MixedBlockHash(f"votes reference {len(hashes)} block hashes")
    accepts = sum(1 for v in votes if v.accept)
    rejects = sum(1 for v in votes if not v.accept)
    if accepts >= quorum:
        return "Committed"
    if accepts + (n_nodes - accepts - rejects) < quorum:
        return "Aborted"
    return "Pending"


class ClusterWorld:
    def __init__(
        self,
        config: QuorumConfig,
        seed: str,
        extra_identities: tuple[str, ...] = (),
        fault_plan: list[Fault] | None = None,
    ) -> None:
        self.config = config
        self.rng_seed = seed
        node_ids = [f"node-{i}" for i in range(config.n_nodes)]
        self.keyring, self.signers = bootstrap_keyring(seed, node_ids + list(extra_identities))
        self.nodes: dict[str, NodeState] = {nid: NodeState(nid, Chain()) for nid in node_ids}
        self.in_flight: deque[Envelope] = deque()
        self.clock = 0
        self.ledger = Chain()
        self.backlog: deque[TransactionRecord] = deque()
        self.round: RoundState | None = None
        self.attempt = 0
        self.submitted_count = 0
        self.committed_count = 0
        self.expired_count = 0
        self.stall_ticks = 0
        self.safety_violations: list[str] = []
        self._committed_hashes: dict[int, str] = {}
        self._schedule: list[CrashNode | RestartNode] = []
        self.drops: list[DropMessage] = []
        self.partitions: list[Partition] = []
        for fault in fault_plan or []:
            self.schedule_fault(fault)

    # -- fault scheduling -------------------------------------------------

    def schedule_fault(self, fault: Fault) -> None:
        if isinstance(fault, (CrashNode, RestartNode)):
            if fault.node not in self.nodes:
                raise UnknownNode(fault.node)
            self._schedule.append(fault)
            self._schedule.sort(key=lambda f: f.tick)
        elif isinstance(fault, DropMessage):
            self.drops.append(fault)
        elif isinstance(fault, Partition):
            self.partitions.append(fault)
        else:
            raise TypeError(f"unknown fault {fault!r}")

    def _due_fault(self) -> CrashNode | RestartNode | None:
        if self._schedule and self._schedule[0].tick <= self.clock:
            return self._schedule.pop(0)
        return None

    def _reachable(self, a: str, b: str) -> bool:
        return not any(p.separates(a, b, self.clock) for p in self.partitions)

    # -- submission -------------------------------------------------------

    def submit(self, tx: TransactionRecord) -> None:
        if self.ledger.has_committed(tx.tx_id) or any(t.tx_id == tx.tx_id for t in self.backlog):
            raise DuplicateTransaction(tx.tx_id)
        if self.round is not None and any(t.tx_id == tx.tx_id for t in self.round.block.transactions):
            raise DuplicateTransaction(tx.tx_id)
        body = transaction_body(tx)
        self.keyring.verify(tx.author, body, tx.signature)
        self.backlog.append(tx)
        self.submitted_count += 1

    def withdraw(self, tx_id: str) -> bool:
        """Un-submit a transaction still waiting in the backlog.

        Lets a caller that gave up on a stalled commit retract its intent so
        the transaction cannot surface later if the cluster heals. Returns
        False when the transaction is not withdrawable (unknown, already
        committed, or mid-round).
        """
        for tx in self.backlog:
            if tx.tx_id == tx_id:
                self.backlog.remove(tx)
                self.submitted_count -= 1
                return True
        return False

    # -- round control ----------------------------------------------------

    def up_count(self) -> int:
        return sum(1 for n in self.nodes.values() if n.status == UP)

    def designated_leader(self) -> str:
        return leader_for(self.ledger.height + 1, self.attempt, self.config)

    def propose_block(self, leader_id: str) -> Block:
        """Explicit proposal entry point; housekeeping uses the same path."""
        if not self.backlog:
            raise EmptyPool("backlog is empty")
        designated = self.designated_leader()
        if leader_id != designated:
            raise NotLeader(f"{leader_id} is not the designated leader {designated}")
        if self.nodes[designated].status != UP:
            raise LeaderCrashed(designated)
        return self._start_round(designated)

    def _start_round(self, leader_id: str) -> Block:
        take = min(self.config.batch_size, len(self.backlog))
        txs = tuple(self.backlog.popleft() for _ in range(take))
        height = self.ledger.height + 1
        block = make_block(height, self.ledger.tip_hash, txs, leader_id, self.clock)
        self.round = RoundState(
            height=height, attempt=self.attempt, leader=leader_id, block=block, started=self.clock
        )
        leader_signer = self.signers[leader_id]
        for node_id in self.nodes:
            if node_id != leader_id:
                self.in_flight.append(Envelope(node_id, make_propose(leader_signer, block)))
        self._record_vote(leader_id, True, "")
        return block

    def _record_vote(self, node_id: str, accept: bool, reason: str) -> None:
        assert self.round is not None
        if node_id in self.round.votes:
            return
        vote = make_vote(self.signers[node_id], self.round.height, self.round.block.block_hash, accept)
        self.round.votes[node_id] = vote
        if reason:
            self.round.reasons[node_id] = reason
        self._tally_round()

    def _tally_round(self) -> None:
        assert self.round is not None
        votes = self.round.votes
        accepts = sum(1 for v in votes.values() if v.accept)
        if accepts >= self.config.quorum:
            self._commit_round()
            return
        rejected = sum(1 for v in votes.values() if not v.accept)
        potential = sum(
            1
            for node_id, node in self.nodes.items()
            if node.status == UP and node_id not in votes
        )
        if accepts + potential < self.config.quorum:
            self._abort_round()

    def _commit_round(self) -> None:
        assert self.round is not None
        rnd = self.round
        votes = tuple(sorted(rnd.votes.values(), key=lambda v: v.node))
        committed = with_votes(rnd.block, votes)
        self._note_commit(committed)
        self.ledger.append_block(committed)
        leader = self.nodes[rnd.leader]
        if leader.status == UP and leader.chain.height + 1 == committed.height:
            leader.chain.append_block(committed)
        signer = self.signers[rnd.leader]
        for node_id in self.nodes:
            if node_id != rnd.leader:
                self.in_flight.append(Envelope(node_id, make_commit(signer, committed)))
        self.committed_count += len(committed.transactions)
        self.round = None
        self.attempt = 0

    def _abort_round(self) -> None:
        assert self.round is not None
        for tx in reversed(self.round.block.transactions):
            self.backlog.appendleft(tx)
        self.round = None
        self.attempt += 1

    def _note_commit(self, block: Block) -> None:
        known = self._committed_hashes.get(block.height)
        if known is None:
            self._committed_hashes[block.height] = block.block_hash
        elif known != block.block_hash:
            self.safety_violations.append(
                f"height {block.height}: {known[:12]} vs {block.block_hash[:12]}"
            )

    # -- message handling -------------------------------------------------

    def _deliver(self, envelope: Envelope) -> None:
        message = envelope.message
        for rule in self.drops:
            if rule.matches(envelope.recipient, message):
                rule.count -= 1
                return
        if not self._reachable(message.sender, envelope.recipient):
            return
        recipient = self.nodes[envelope.recipient]
        if recipient.status != UP:
            return
        if not check_message(self.keyring, message):
            return
        if isinstance(message, Propose):
            self._on_propose(recipient, message)
        elif isinstance(message, VoteMsg):
            self._on_vote(message)
        elif isinstance(message, CommitMsg):
            self._on_commit(recipient, message)

    def _on_propose(self, node: NodeState, message: Propose) -> None:
        accept, reason = validate_proposal(node, message.block, self.keyring)
        vote = make_vote(self.signers[node.node_id], message.height, message.block.block_hash, accept)
        self.in_flight.append(
            Envelope(
                message.sender,
                VoteMsg(
                    height=message.height,
                    block_hash=message.block.block_hash,
                    accept=accept,
                    reason=reason,
                    sender=node.node_id,
                    signature=vote.signature,
                ),
            )
        )

    def _on_vote(self, message: VoteMsg) -> None:
        rnd = self.round
        if rnd is None or rnd.leader not in self.nodes:
            return
        if self.nodes[rnd.leader].status != UP:
            return
        if message.height != rnd.height or message.block_hash != rnd.block.block_hash:
            return
        if message.sender in rnd.votes:
            return
        rnd.votes[message.sender] = Vote(message.sender, message.accept, message.signature)
        if message.reason:
            rnd.reasons[message.sender] = message.reason
        self._tally_round()

    def _on_commit(self, node: NodeState, message: CommitMsg) -> None:
        block = message.block
        if block.height <= node.chain.height:
            return
        if block.height == node.chain.height + 1 and block.prev_hash == node.chain.tip_hash:
            self._note_commit(block)
            node.chain.append_block(block)
        else:
            self._resync(node)

    # -- recovery ----------------------------------------------------------

    def _resync(self, node: NodeState) -> bool:
        """Copy a longer verified replica from the first reachable Up peer."""
        for peer_id, peer in self.nodes.items():
            if peer_id == node.node_id or peer.status != UP:
                continue
            if not self._reachable(node.node_id, peer_id):
                continue
            if peer.chain.height <= node.chain.height:
                continue
            candidate = Chain(blocks=list(peer.chain.blocks))
            if verify_replica(candidate, self.keyring, self.config.quorum).ok:
                for block in candidate.blocks[node.chain.height :]:
                    self._note_commit(block)
                node.chain = candidate
                return True
        return False

    def _lagging_syncable(self) -> NodeState | None:
        target = self.ledger.height
        for node in self.nodes.values():
            if node.status == UP and node.chain.height < target:
                for peer_id, peer in self.nodes.items():
                    if (
                        peer_id != node.node_id
                        and peer.status == UP
                        and peer.chain.height > node.chain.height
                        and self._reachable(node.node_id, peer_id)
                    ):
                        return node
        return None

    # -- fault application --------------------------------------------------

    def _apply_fault(self, fault: CrashNode | RestartNode) -> None:
        node = self.nodes[fault.node]
        if isinstance(fault, CrashNode):
            node.status = CRASHED
            if self.round is not None and self.round.leader == fault.node:
                self._abort_round()
            elif self.round is not None:
                # A crashed voter shrinks the reachable vote set.
                self._tally_round()
        else:
            node.status = UP
            self._resync(node)

    # -- the step function ---------------------------------------------------

    def step(self) -> None:
        fault = self._due_fault()
        if fault is not None:
            self._apply_fault(fault)
        elif self.in_flight:
            self._deliver(self.in_flight.popleft())
        else:
            self._housekeeping()
        for node in self.nodes.values():
            if node.status == UP:
                node.up_ticks += 1
        if self.up_count() < self.config.quorum:
            self.stall_ticks += 1
        self.clock += 1

    def _housekeeping(self) -> None:
        if self.round is not None:
            if self.clock - self.round.started >= self.config.vote_timeout_ticks:
                self._abort_round()
            return
        laggard = self._lagging_syncable()
        if laggard is not None:
            self._resync(laggard)
            return
        if self.backlog and self.up_count() >= self.config.quorum:
            leader_id = self.designated_leader()
            if self.nodes[leader_id].status != UP:
                self.attempt += 1
                return
            self._start_round(leader_id)

    # -- run control ---------------------------------------------------------

    def _stuck(self) -> bool:
        no_restarts = not any(isinstance(f, RestartNode) for f in self._schedule)
        return self.up_count() < self.config.quorum and no_restarts

    def _any_up_laggard(self) -> bool:
        return any(
            n.status == UP and n.chain.height < self.ledger.height for n in self.nodes.values()
        )

    def _partitions_pending(self) -> bool:
        return any(p.to_tick > self.clock for p in self.partitions)

    def quiescent(self) -> bool:
        if self._schedule or self.in_flight or self.round is not None:
            return False
        if self._lagging_syncable() is not None:
            return False
        # Laggards separated by a live partition window become syncable
        # once it expires; keep ticking until then.
        if self._any_up_laggard() and self._partitions_pending():
            return False
        if self.backlog and not self._stuck():
            return False
        return True


def run_until_quiescent(world: ClusterWorld, max_ticks: int = 100_000) -> int:
    """Step until no further progress is possible; returns ticks consumed."""
    start = world.clock
    while not world.quiescent():
        if world.clock - start >= max_ticks:
            raise RuntimeError(f"no quiescence within {max_ticks} ticks")
        world.step()
    return world.clock - start
