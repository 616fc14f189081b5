"""Ed25519 identities for nodes and services.

Key material is derived deterministically from a seed string so that whole
clusters can be reconstructed from a scenario seed: the private key bytes are
sha256("ledgerair-key:{seed}:{identity}"). That makes every signature in a
simulation reproducible while remaining a real Ed25519 signature.
"""

from __future__ import annotations

import hashlib

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .errors import BadSignature, UnknownNode


def derive_private_key(seed: str, identity: str) -> Ed25519PrivateKey:
    material = hashlib.sha256(f"ledgerair-key:{seed}:{identity}".encode("utf-8")).digest()
    return Ed25519PrivateKey.from_private_bytes(material)


class Signer:
    """Holds one identity's private key and signs raw byte strings."""

    def __init__(self, identity: str, private_key: Ed25519PrivateKey) -> None:
        self.identity = identity
        self._key = private_key

    def sign(self, message: bytes) -> bytes:
        return self._key.sign(message)

    def public_bytes(self) -> bytes:
        from cryptography.hazmat.primitives.serialization import (
            Encoding,
            PublicFormat,
        )

        return self._key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def derive_signer(seed: str, identity: str) -> Signer:
    return Signer(identity, derive_private_key(seed, identity))


class KeyRing:
    """Maps identities to Ed25519 public keys and verifies signatures."""

    def __init__(self) -> None:
        self._keys: dict[str, Ed25519PublicKey] = {}

    def register(self, identity: str, public_key_bytes: bytes) -> None:
        self._keys[identity] = Ed25519PublicKey.from_public_bytes(public_key_bytes)

    def knows(self, identity: str) -> bool:
        return identity in self._keys

    def identities(self) -> list[str]:
        return sorted(self._keys)

    def public_bytes(self, identity: str) -> bytes:
        from cryptography.hazmat.primitives.serialization import (
            Encoding,
            PublicFormat,
        )

        if identity not in self._keys:
            raise UnknownNode(identity)
        return self._keys[identity].public_bytes(Encoding.Raw, PublicFormat.Raw)

    def verify(self, identity: str, message: bytes, signature: bytes) -> None:
        if identity not in self._keys:
            raise UnknownNode(identity)
        try:
            self._keys[identity].verify(signature, message)
        except InvalidSignature as exc:
            raise BadSignature(f"bad signature from {identity}") from exc

    def check(self, identity: str, message: bytes, signature: bytes) -> bool:
        try:
            self.verify(identity, message, signature)
        except (BadSignature, UnknownNode):
            return False
        return True


def bootstrap_keyring(seed: str, identities: list[str]) -> tuple[KeyRing, dict[str, Signer]]:
    """Derive signers for every identity and register their public keys."""
    ring = KeyRing()
    signers: dict[str, Signer] = {}
    for identity in identities:
        signer = derive_signer(seed, identity)
        signers[identity] = signer
        ring.register(identity, signer.public_bytes())
    return ring, signers
