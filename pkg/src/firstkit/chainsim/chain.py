"""Minimal chain state: height, deployed contracts and the pending pool."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .contract import FirstContract
from .miner import MempoolEntry


@dataclass
class Chain:
    height: int = 0
    contracts: dict[str, FirstContract] = field(default_factory=dict)
    pool: list[MempoolEntry] = field(default_factory=list)

    def deploy(self, contract: FirstContract) -> str:
        addr = "0x" + hashlib.sha256(f"contract:{len(self.contracts)}".encode()).hexdigest()[:40]
        contract.address = addr
        self.contracts[addr] = contract
        return addr

    def contract(self, addr: str) -> FirstContract:
        return self.contracts[addr]

    def submit(self, entry: MempoolEntry) -> None:
        self.pool.append(entry)

    def pending_for(self, contract_addr: str) -> int:
        return sum(1 for e in self.pool if e.contract_addr == contract_addr)

    def advance(self, blocks: int = 1) -> int:
        self.height += blocks
        return self.height
