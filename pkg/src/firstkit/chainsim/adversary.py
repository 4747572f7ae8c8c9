"""Frontrunning strategies reacting to FIRST transactions seen in the pool.

A strategy only decides *when* its own transaction can enter the pool and
which challenge block it will carry; the simulator does the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

STRATEGIES = ("none", "reactive", "offline_precompute")


@dataclass(frozen=True)
class PlannedSubmit:
    target: str
    at: float
    tip: int
    # block height the challenge was issued at; None means "read it at request time"
    block_curr: Optional[int]
    request_at: float


def outbid(victim_tip: int, markup: float) -> int:
    return int(victim_tip * markup) + 1


def adversary_step(strategy: str, victim_id: str, victim_tip: int, now: float, t1: float,
                   markup: float = 1.1, latency: float = 0.0,
                   stock_ready_at: float = 0.0) -> Optional[PlannedSubmit]:
    """Plan a reply to a victim transaction first seen at ``now``.

    - reactive: request a challenge after ``latency``, evaluate the VDF for
      t1 seconds, then submit with a higher tip.
    - offline_precompute: the challenge was requested at block 0 and
      evaluated in advance; once the stock is ready the reply is immediate.
    """
    if strategy == "none":
        return None
    tip = outbid(victim_tip, markup)
    if strategy == "reactive":
        start = now + latency
        return PlannedSubmit(victim_id, start + t1, tip, None, start)
    if strategy == "offline_precompute":
        at = max(now + latency, stock_ready_at)
        return PlannedSubmit(victim_id, at, tip, 0, 0.0)
    raise ValueError(f"unknown adversary strategy {strategy!r}")
