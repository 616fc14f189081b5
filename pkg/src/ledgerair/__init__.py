"""Permissioned hash-chained reservation ledger with quorum consensus.

The package bundles four layers: the block ledger itself, a deterministic
multi-node consensus simulation, a declarative contract engine for booking
workflows, and an HTTP gateway plus scenario harness on top.
"""

__version__ = "0.1.0"
