"""Signed consensus messages and the in-flight envelope."""

from __future__ import annotations

from dataclasses import dataclass

from ..codec import enc_str, enc_u64
from ..keys import KeyRing, Signer
from ..ledger.blocks import Block, header_bytes


@dataclass(frozen=True, slots=True)
class Propose:
    kind = "Propose"
    height: int
    block: Block
    sender: str
    signature: bytes


@dataclass(frozen=True, slots=True)
class VoteMsg:
    kind = "Vote"
    height: int
    block_hash: str
    accept: bool
    reason: str
    sender: str
    signature: bytes


@dataclass(frozen=True, slots=True)
class CommitMsg:
    kind = "Commit"
    height: int
    block: Block
    sender: str
    signature: bytes


Message = Propose | VoteMsg | CommitMsg


@dataclass(frozen=True, slots=True)
class Envelope:
    recipient: str
    message: Message


def _propose_bytes(block: Block) -> bytes:
    return enc_str("propose") + header_bytes(
        block.height, block.prev_hash, block.tx_digest, block.proposer, block.logical_time
    )


def _commit_bytes(height: int, block_hash: str, sender: str) -> bytes:
    return enc_str("commit") + enc_u64(height) + enc_str(block_hash) + enc_str(sender)


def make_propose(signer: Signer, block: Block) -> Propose:
    return Propose(
        height=block.height,
        block=block,
        sender=signer.identity,
        signature=signer.sign(_propose_bytes(block)),
    )


def make_commit(signer: Signer, block: Block) -> CommitMsg:
    return CommitMsg(
        height=block.height,
        block=block,
        sender=signer.identity,
        signature=signer.sign(_commit_bytes(block.height, block.block_hash, signer.identity)),
    )


def check_message(keyring: KeyRing, message: Message) -> bool:
    from ..ledger.blocks import vote_message

    if isinstance(message, Propose):
        return keyring.check(message.sender, _propose_bytes(message.block), message.signature)
    if isinstance(message, VoteMsg):
        signed = vote_message(message.height, message.block_hash, message.accept, message.sender)
        return keyring.check(message.sender, signed, message.signature)
    if isinstance(message, CommitMsg):
        signed = _commit_bytes(message.height, message.block.block_hash, message.sender)
        return keyring.check(message.sender, signed, message.signature)
    return False
