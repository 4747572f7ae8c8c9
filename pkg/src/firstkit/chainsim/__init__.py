"""EIP-1559 chain simulator: fee rule, greedy miner, contract validation and
frontrunning adversaries."""

from .fees import base_fee_update
from .miner import MempoolEntry, mine_block
from .contract import (
    BAD_AGGREGATE, BAD_USER_SIGNATURE, CHALLENGE_REUSED, HASH_MISMATCH, MISSING_ACCEPT,
    MISSING_CHALLENGE, NO_MAJORITY, REASONS, STALE, FirstContract, Verdict, contract_validate,
)
from .chain import Chain
from .adversary import STRATEGIES, PlannedSubmit, adversary_step
from .sim import SCHEMA, SimConfig, SimReport, SimTxRecord, BlockStat, run_simulation

__all__ = [
    "base_fee_update", "MempoolEntry", "mine_block", "BAD_AGGREGATE", "BAD_USER_SIGNATURE",
    "CHALLENGE_REUSED", "HASH_MISMATCH", "MISSING_ACCEPT", "MISSING_CHALLENGE", "NO_MAJORITY",
    "REASONS", "STALE", "FirstContract", "Verdict", "contract_validate", "Chain",
    "STRATEGIES", "PlannedSubmit", "adversary_step", "SCHEMA", "SimConfig", "SimReport",
    "SimTxRecord", "BlockStat", "run_simulation",
]
