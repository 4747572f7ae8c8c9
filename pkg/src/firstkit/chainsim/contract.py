"""The on-chain validation engine for FIRST transactions.

:func:`contract_validate` is the stateless check sequence; :class:`FirstContract`
wraps it with the deployed verifier set, the freshness threshold and a
record of executed challenges so one challenge cannot execute twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .. import aggsig
from ..messages import FirstTransaction, parse_accept, parse_challenge

HASH_MISMATCH = "HashMismatch"
MISSING_CHALLENGE = "MissingChallenge"
MISSING_ACCEPT = "MissingAccept"
NO_MAJORITY = "NoMajority"
BAD_AGGREGATE = "BadAggregate"
BAD_USER_SIGNATURE = "BadUserSignature"
STALE = "Stale"
CHALLENGE_REUSED = "ChallengeReused"

REASONS = (HASH_MISMATCH, MISSING_CHALLENGE, MISSING_ACCEPT, NO_MAJORITY, BAD_AGGREGATE,
           BAD_USER_SIGNATURE, STALE, CHALLENGE_REUSED)


@dataclass(frozen=True)
class Verdict:
    executed: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.executed


EXECUTE = Verdict(True)


def _registered(verifier_set: Mapping[str, bytes], vid: str, pk: bytes) -> bool:
    return verifier_set.get(vid) == pk


def challenge_signers(tx: FirstTransaction, verifier_set: Mapping[str, bytes]) -> set[str]:
    """Registered verifiers whose M_i binds (l, h, ., block_curr) of ``tx``."""
    h = tx.details.digest()
    out = set()
    b = tx.challenge_bundle
    for m, pk in zip(b.messages, b.public_keys):
        c = parse_challenge(m)
        if (c is not None and c.ell == tx.challenge and c.digest == h
                and c.block_curr == tx.block_curr and _registered(verifier_set, c.verifier_id, pk)):
            out.add(c.verifier_id)
    return out


def accept_signers(tx: FirstTransaction, verifier_set: Mapping[str, bytes]) -> set[str]:
    out = set()
    b = tx.accept_bundle
    for m, pk in zip(b.messages, b.public_keys):
        a = parse_accept(m)
        if a is not None and a.ell == tx.challenge and _registered(verifier_set, a.verifier_id, pk):
            out.add(a.verifier_id)
    return out


def contract_validate(tx: FirstTransaction, block_now: int, threshold: int,
                      verifier_set: Mapping[str, bytes]) -> Verdict:
    """Run the checks in order and report the first one that fails.

    1. H(M_A) is the digest bound in M_agg           (HashMismatch)
    2. some M_i carries (l, h, ., block_curr)         (MissingChallenge)
    3. some M'_i carries ("accept", ., l)             (MissingAccept)
    4. both signer counts exceed |V|/2               (NoMajority)
    5. M'_agg and M_agg aggregate-verify             (BadAggregate)
    6. sigma'_A verifies over M' under pk_A          (BadUserSignature)
    7. 0 <= block_now - block_curr <= threshold      (Stale)

    Signers count only when their key matches the deployed verifier set.
    """
    n = len(verifier_set)
    h = tx.details.digest()
    bound = {c.digest for c in map(parse_challenge, tx.challenge_bundle.messages) if c is not None}
    if h not in bound:
        return Verdict(False, HASH_MISMATCH)
    chal = challenge_signers(tx, verifier_set)
    if not chal:
        return Verdict(False, MISSING_CHALLENGE)
    acc = accept_signers(tx, verifier_set)
    if not acc:
        return Verdict(False, MISSING_ACCEPT)
    if 2 * len(chal) <= n or 2 * len(acc) <= n:
        return Verdict(False, NO_MAJORITY)
    if not (aggsig.aggregate_verify(tx.accept_bundle)
            and aggsig.aggregate_verify(tx.challenge_bundle)):
        return Verdict(False, BAD_AGGREGATE)
    if not aggsig.verify(tx.user_pk, tx.payload_bytes(), tx.user_sig):
        return Verdict(False, BAD_USER_SIGNATURE)
    if not (tx.block_curr <= block_now and block_now - tx.block_curr <= threshold):
        return Verdict(False, STALE)
    return EXECUTE


@dataclass
class FirstContract:
    """A deployed FIRST-protected dApp contract."""

    verifier_set: dict[str, bytes]
    threshold: int
    owner: str = "dAC"
    address: str = ""
    executed: dict[int, bytes] = field(default_factory=dict)
    log: list[tuple[int, str, Optional[str]]] = field(default_factory=list)

    def descriptor(self) -> dict:
        return {"address": self.address, "owner": self.owner, "threshold": self.threshold,
                "verifiers": {k: v.hex() for k, v in sorted(self.verifier_set.items())}}

    def execute(self, tx: FirstTransaction, block_now: int) -> Verdict:
        verdict = contract_validate(tx, block_now, self.threshold, self.verifier_set)
        if verdict and tx.challenge in self.executed:
            verdict = Verdict(False, CHALLENGE_REUSED)
        if verdict:
            self.executed[tx.challenge] = tx.tx_hash()
        self.log.append((block_now, tx.tx_hash().hex(), verdict.reason))
        return verdict
