"""End-to-end orchestration of one verifier federation.

:class:`Federation` wires the per-actor steps of :mod:`.ops` together over an
in-process transport, logging every message to a :class:`Transcript`. It can
also play corrupted parties:

- ``byzantine`` maps a verifier index to ``drop`` (no reply), ``garbage``
  (random signature) or ``replay`` (validly signed reply about a stale l).
- ``coordinator_faults`` holds any of ``replay_ell``, ``bad_challenge_aggregate``
  and ``bad_accept_aggregate``.

``schedule="threaded"`` runs each verifier's reply on its own worker thread;
replies are collected and ordered by verifier id, so outcomes match the
sequential schedule exactly.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .. import aggsig
from ..aggsig import KeyPair, SignedBundle
from ..chainsim.chain import Chain
from ..chainsim.contract import Verdict
from ..chainsim.miner import MempoolEntry
from ..encoding import encode
from ..errors import ProtocolError, SessionAborted
from ..messages import (
    Endorsement, FirstTransaction, accept_message, challenge_message, encode_bundle,
)
from ..vdf import VdfProof
from . import ops
from .state import (
    ChallengeRecord, CoordinatorState, EpochConfig, EpochConstraints, UserTxIntent,
)
from .transcript import Transcript

BEHAVIORS = ("honest", "drop", "garbage", "replay")
COORDINATOR_FAULTS = ("replay_ell", "bad_challenge_aggregate", "bad_accept_aggregate")
MAX_RETRIES = 3


@dataclass
class Attempt:
    ell: int
    outcome: str
    challenge_bundle: Optional[SignedBundle] = None
    proof: Optional[VdfProof] = None
    accept_bundle: Optional[SignedBundle] = None
    tx: Optional[FirstTransaction] = None


@dataclass
class SessionResult:
    tx: FirstTransaction
    attempts: list[Attempt] = field(default_factory=list)


class Federation:
    def __init__(self, verifier_count: int = 3, security_k: int = 32, difficulty_T: int = 256,
                 seed=0, chain: Optional[Chain] = None, coordinator_index: int = 0,
                 threshold: int = 5, share_bits: Optional[int] = None,
                 constraints: Optional[EpochConstraints] = None, schedule: str = "sequential",
                 transcript: Optional[Transcript] = None, share_provider=None):
        if schedule not in ("sequential", "threaded"):
            raise ValueError(f"unknown schedule {schedule!r}")
        if difficulty_T <= 0:
            raise ProtocolError("difficulty must be positive at the protocol layer")
        self.seed = seed
        self.schedule = schedule
        self.chain = chain if chain is not None else Chain()
        self.transcript = transcript if transcript is not None else Transcript()
        self.contract, self.verifiers = ops.system_setup(verifier_count, security_k, self.chain,
                                                         seed=seed, threshold=threshold)
        self.verifier_set = dict(self.contract.verifier_set)
        if not 0 <= coordinator_index < verifier_count:
            raise ValueError("coordinator index out of range")
        coord = self.verifiers[coordinator_index]
        self.coordinator = CoordinatorState(coord.vid, random.Random(f"{seed}:coordinator"),
                                            security_k)
        self.coordinator_id = f"coordinator:{coord.vid}"
        self.share_bits = share_bits
        gen = ops.param_gen(self.verifiers, difficulty_T, security_k, share_bits=share_bits,
                            share_provider=share_provider, transcript=self.transcript)
        self.pp, self.pp_sigs, self.restarts = gen.pp, gen.signatures, gen.restarts
        c = constraints or EpochConstraints()
        self.epoch = EpochConfig(0, difficulty_T, self.pp.modulus, c.recommended_tip_pct,
                                 threshold, difficulty_T * c.seconds_per_step, c.t2_seconds,
                                 verifier_count)
        self.byzantine: dict[int, str] = {}
        self.coordinator_faults: set[str] = set()
        self._fault_rng = random.Random(f"{seed}:faults")
        self._pool = ThreadPoolExecutor(max_workers=verifier_count) if schedule == "threaded" else None

    # -- configuration ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.verifiers)

    def corrupt(self, byzantine: Optional[dict[int, str]] = None,
                coordinator_faults=()) -> "Federation":
        for b in (byzantine or {}).values():
            if b not in BEHAVIORS:
                raise ValueError(f"unknown verifier behavior {b!r}")
        for f in coordinator_faults:
            if f not in COORDINATOR_FAULTS:
                raise ValueError(f"unknown coordinator fault {f!r}")
        self.byzantine = dict(byzantine or {})
        self.coordinator_faults = set(coordinator_faults)
        return self

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def user(self, name: str) -> KeyPair:
        return aggsig.keygen(f"{self.seed}:user:{name}")

    def rotate(self, new_T: int, constraints: Optional[EpochConstraints] = None) -> EpochConfig:
        self.epoch, gen = ops.epoch_rotate(self.verifiers, self.epoch, new_T, self.chain,
                                           self.contract.address, constraints,
                                           share_bits=self.share_bits,
                                           transcript=self.transcript)
        self.pp, self.pp_sigs = gen.pp, gen.signatures
        self.contract.threshold = self.epoch.freshness_threshold
        return self.epoch

    # -- transport ---------------------------------------------------------------

    def _fan_out(self, fn: Callable[[int], Optional[Endorsement]]) -> list[Optional[Endorsement]]:
        idx = range(self.n)
        if self._pool is None:
            return [fn(i) for i in idx]
        return list(self._pool.map(fn, idx))

    def _log_reply(self, i: int, kind: str, reply: Optional[Endorsement]) -> None:
        payload = (encode(reply.message, reply.signature.sigma) if reply is not None
                   else b"bottom")
        self.transcript.record(f"verifier:{self.verifiers[i].vid}", self.coordinator_id, kind,
                               payload)

    def _misbehave(self, i: int, honest: Optional[Endorsement], stale: bytes) -> Optional[Endorsement]:
        b = self.byzantine.get(i, "honest")
        v = self.verifiers[i]
        if b == "honest":
            return honest
        if b == "drop":
            return None
        if b == "garbage":
            msg = honest.message if honest is not None else stale
            return Endorsement(v.vid, msg, aggsig.Signature(aggsig.random_g1(self._fault_rng)))
        # replay: a correctly signed statement about some other challenge
        return Endorsement(v.vid, stale, aggsig.sign(v.keypair, stale))

    # -- protocol phases ----------------------------------------------------------

    def request_challenge(self, intent: UserTxIntent) -> tuple[ChallengeRecord, Optional[SignedBundle]]:
        """User asks the coordinator for l; verifiers endorse; coordinator aggregates."""
        user_id = f"user:{intent.details.user_addr}"
        self.transcript.record(user_id, self.coordinator_id, "intent",
                               encode(intent.digest, intent.user_sig.sigma, intent.public_key))
        block_curr = self.chain.height
        if "replay_ell" in self.coordinator_faults and self.coordinator.handed_out:
            record = ChallengeRecord(self.coordinator.handed_out[-1], intent.digest, block_curr)
        else:
            record = ops.coordinator_issue(self.coordinator, intent.digest, block_curr)
        ell = record.ell

        def reply(i: int) -> Optional[Endorsement]:
            v = self.verifiers[i]
            self.transcript.record(self.coordinator_id, f"verifier:{v.vid}", "challenge",
                                   encode(intent.digest, ell, intent.user_sig.sigma,
                                          intent.public_key))
            if self.byzantine.get(i, "honest") in ("drop", "replay"):
                honest = None
            else:
                honest = ops.verifier_endorse_challenge(v, intent.digest, ell, intent.user_sig,
                                                        intent.public_key, block_curr)
            stale = challenge_message(ell + 2, intent.digest, v.vid, block_curr)
            return self._misbehave(i, honest, stale)

        responses = self._fan_out(reply)
        for i, r in enumerate(responses):
            self._log_reply(i, "endorse_challenge", r)
        bundle = ops.coordinator_aggregate(
            responses, self.verifier_set, ops.challenge_expectation(ell, intent.digest, block_curr))
        if bundle is not None and "bad_challenge_aggregate" in self.coordinator_faults:
            bundle = SignedBundle(aggsig.random_g1(self._fault_rng), bundle.messages,
                                  bundle.public_keys)
        self.transcript.record(self.coordinator_id, user_id, "challenge_bundle",
                               encode(ell, encode_bundle(bundle)) if bundle else b"bottom")
        return record, bundle

    def submit_proof(self, intent: UserTxIntent, record: ChallengeRecord,
                     proof: Optional[VdfProof]) -> Optional[SignedBundle]:
        user_id = f"user:{intent.details.user_addr}"
        ell = record.ell
        wire = (encode(ell, proof.x, proof.y, proof.pi, proof.challenge) if proof is not None
                else encode(ell))

        def reply(i: int) -> Optional[Endorsement]:
            v = self.verifiers[i]
            self.transcript.record(user_id, f"verifier:{v.vid}", "proof", wire)
            if self.byzantine.get(i, "honest") in ("drop", "replay"):
                honest = None
            else:
                honest = ops.verifier_endorse_proof(v, ell, proof)
            return self._misbehave(i, honest, accept_message(v.vid, ell + 2))

        responses = self._fan_out(reply)
        for i, r in enumerate(responses):
            self._log_reply(i, "endorse_proof", r)
        bundle = ops.coordinator_aggregate(responses, self.verifier_set,
                                           ops.accept_expectation(ell))
        if bundle is not None and "bad_accept_aggregate" in self.coordinator_faults:
            bundle = SignedBundle(aggsig.random_g1(self._fault_rng), bundle.messages,
                                  bundle.public_keys)
        self.transcript.record(self.coordinator_id, user_id, "accept_bundle",
                               encode_bundle(bundle) if bundle else b"bottom")
        return bundle

    def attempt(self, intent: UserTxIntent, declared_tip_pct: float = 0.0) -> Attempt:
        """One try at the full pipeline; the outcome names where it stopped."""
        record, cb = self.request_challenge(intent)
        if cb is None:
            return Attempt(record.ell, "challenge_bottom")
        proof = ops.user_eval_and_submit_proof(intent, record, cb, self.pp, self.pp_sigs,
                                               self.verifier_set)
        if proof is None:
            return Attempt(record.ell, "eval_bottom", cb)
        ab = self.submit_proof(intent, record, proof)
        if ab is None:
            return Attempt(record.ell, "proof_bottom", cb, proof)
        tx = ops.user_build_tx(intent, record, cb, ab, self.verifier_set, declared_tip_pct)
        if tx is None:
            return Attempt(record.ell, "build_bottom", cb, proof, ab)
        return Attempt(record.ell, "ok", cb, proof, ab, tx)

    def run(self, intent: UserTxIntent, declared_tip_pct: float = 0.0,
            retries: int = MAX_RETRIES) -> SessionResult:
        """Retry with a fresh l until a transaction is built or retries run out."""
        attempts = []
        for _ in range(retries + 1):
            a = self.attempt(intent, declared_tip_pct)
            attempts.append(a)
            if a.tx is not None:
                return SessionResult(a.tx, attempts)
        raise SessionAborted(f"no transaction after {len(attempts)} attempts: "
                             + ", ".join(a.outcome for a in attempts))

    # -- chain -------------------------------------------------------------------

    def submit(self, tx: FirstTransaction, tip: int = 0, now: float = 0.0) -> MempoolEntry:
        self.transcript.record(f"user:{tx.details.user_addr}", "chain:pool", "tx",
                               encode(tx.tx_hash()))
        entry = MempoolEntry(tx.tx_hash().hex(), tip, now, kind="first", tx=tx,
                             contract_addr=tx.details.contract_addr)
        self.chain.submit(entry)
        return entry

    def execute(self, tx: FirstTransaction, block_now: Optional[int] = None) -> Verdict:
        return self.contract.execute(tx, self.chain.height if block_now is None else block_now)
