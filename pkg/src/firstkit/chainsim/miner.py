"""Pending pool entries and the greedy, tip-ordered miner."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional


@dataclass
class MempoolEntry:
    tx_id: str
    tip: int
    submit_time: float
    gas: int = 21_000
    kind: str = "plain"
    tx: Any = None
    contract_addr: Optional[str] = None
    max_fee: Optional[int] = None
    tx_hash: bytes = field(default=b"")

    def __post_init__(self):
        if self.tip < 0:
            raise ValueError("tip must be non-negative")
        if not self.tx_hash:
            self.tx_hash = (self.tx.tx_hash() if hasattr(self.tx, "tx_hash")
                            else hashlib.sha256(self.tx_id.encode()).digest())


def ordering_key(entry: MempoolEntry):
    # the miner sees only (tip, arrival, hash); FIRST payloads stay opaque
    return (-entry.tip, entry.submit_time, entry.tx_hash)


def mine_block(pool: Iterable[MempoolEntry], block_gas_limit: int,
               block_qty: Optional[int] = None,
               base_fee: Optional[int] = None) -> tuple[list[MempoolEntry], list[MempoolEntry]]:
    """Split ``pool`` into (included block, deferred remainder).

    Entries are taken in descending tip order; filling stops at the first entry
    that would exceed the gas limit or the per-block transaction cap. With
    ``base_fee`` given, entries whose fee cap is below it wait out the block.
    """
    eligible, priced_out = [], []
    for e in pool:
        capped = base_fee is not None and e.max_fee is not None and e.max_fee < base_fee
        (priced_out if capped else eligible).append(e)
    ordered = sorted(eligible, key=ordering_key)
    used = 0
    cut = 0
    for e in ordered:
        if block_qty is not None and cut >= block_qty:
            break
        if used + e.gas > block_gas_limit:
            break
        used += e.gas
        cut += 1
    return ordered[:cut], ordered[cut:] + priced_out
