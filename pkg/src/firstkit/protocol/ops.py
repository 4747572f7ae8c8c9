"""Per-actor protocol steps.

Each function is one actor's reaction to one message. ``None`` stands for
the bottom response: the step refused and the caller may retry.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .. import aggsig
from ..aggsig import KeyPair, Signature, SignedBundle
from ..chainsim.chain import Chain
from ..chainsim.contract import FirstContract
from ..errors import (
    EvenVerifierCount, PendingPoolNotEmpty, ProtocolError, SetupFailed, VdfError,
)
from ..messages import (
    Endorsement, FirstTransaction, TxDetails, accept_message, challenge_message, parse_accept,
    parse_challenge,
)
from ..vdf import VdfProof, is_probable_prime, vdf_eval, vdf_setup, vdf_verify
from .state import (
    CONSUMED, EVALUATED, ChallengeRecord, CoordinatorState, EpochConfig, EpochConstraints,
    PublicParams, UserTxIntent, VerifierState, random_prime,
)

ShareProvider = Callable[[int, VerifierState], int]


def verifier_key_seed(seed, index: int) -> str:
    return f"{seed}:verifier:{index}"


# -- setup -------------------------------------------------------------------

def system_setup(verifier_count: int, security_k: int, chain: Optional[Chain] = None,
                 seed=0, threshold: int = 5) -> tuple[FirstContract, list[VerifierState]]:
    """Create verifiers with fresh keys and deploy the contract that knows them."""
    if verifier_count % 2 == 0:
        raise EvenVerifierCount(f"verifier count must be odd, got {verifier_count}")
    if verifier_count < 3:
        raise ValueError("at least 3 verifiers are required")
    if security_k <= 0:
        raise ValueError("security_k must be positive")
    verifiers = [
        VerifierState(f"V{i}", aggsig.keygen(verifier_key_seed(seed, i)),
                      random.Random(f"{seed}:rng:V{i}"))
        for i in range(verifier_count)
    ]
    contract = FirstContract({v.vid: v.public_key for v in verifiers}, threshold)
    (chain if chain is not None else Chain()).deploy(contract)
    return contract, verifiers


class ParamGenResult:
    def __init__(self, pp: PublicParams, signatures: dict[str, Signature],
                 restarts: list[dict]):
        self.pp = pp
        self.signatures = signatures
        self.restarts = restarts

    def __iter__(self):
        return iter((self.pp, self.signatures))


def share_ok(share: int) -> bool:
    # N must stay odd, so the even prime does not count
    return share > 2 and is_probable_prime(share)


def param_gen(verifiers: Sequence[VerifierState], difficulty_T: int, security_k: int,
              epoch_id: int = 0, share_bits: Optional[int] = None,
              share_provider: Optional[ShareProvider] = None, max_rounds: int = 8,
              transcript=None) -> ParamGenResult:
    """Federated modulus N = sum of each verifier's prime share, then sign pp.

    Every verifier checks every share; one bad share restarts the round for
    all. ``share_provider(round, verifier)`` overrides share sampling.
    """
    if len(verifiers) % 2 == 0:
        raise EvenVerifierCount(f"verifier count must be odd, got {len(verifiers)}")
    bits = share_bits if share_bits is not None else 2 * security_k + 2
    restarts = []
    for rnd in range(max_rounds):
        shares = {}
        for v in verifiers:
            s = share_provider(rnd, v) if share_provider else random_prime(bits, v.rng)
            shares[v.vid] = int(s)
            if transcript is not None:
                for w in verifiers:
                    if w is not v:
                        transcript.record(f"verifier:{v.vid}", f"verifier:{w.vid}", "share",
                                          str(s).encode())
        bad = sorted(vid for vid, s in shares.items() if not share_ok(s))
        if bad:
            restarts.append({"round": rnd, "bad_shares": bad})
            continue
        n = sum(shares.values())
        pp = PublicParams(epoch_id, vdf_setup(security_k, difficulty_T, n),
                          tuple(shares[v.vid] for v in verifiers))
        sigs = {}
        for v in verifiers:
            v.pp = pp
            v.share = shares[v.vid]
            sigs[v.vid] = aggsig.sign(v.keypair, pp.message())
        return ParamGenResult(pp, sigs, restarts)
    raise SetupFailed(f"no valid share set after {max_rounds} rounds")


def epoch_rotate(verifiers: Sequence[VerifierState], current: EpochConfig, new_T: int,
                 chain: Chain, contract_addr: str,
                 constraints: Optional[EpochConstraints] = None,
                 **param_gen_kw) -> tuple[EpochConfig, ParamGenResult]:
    """Start the next epoch: new pp, cleared D/U lists, epoch id + 1.

    Lowering T while the dApp still has pending transactions is refused
    before anything changes.
    """
    if new_T <= 0:
        raise ProtocolError("difficulty must be positive at the protocol layer")
    if new_T < current.difficulty_T and chain.pending_for(contract_addr) > 0:
        raise PendingPoolNotEmpty(
            f"{chain.pending_for(contract_addr)} pending txs block lowering T")
    c = constraints or EpochConstraints(
        seconds_per_step=current.t1_seconds / current.difficulty_T if current.difficulty_T else 0.0,
        t2_seconds=current.t2_seconds, recommended_tip_pct=current.recommended_tip_pct,
        freshness_threshold=current.freshness_threshold)
    security_k = verifiers[0].pp.vdf.security_k if verifiers[0].pp else 64
    # validates t1 > t2 before any side effect
    EpochConfig(current.epoch_id + 1, new_T, 3, c.recommended_tip_pct, c.freshness_threshold,
                new_T * c.seconds_per_step, c.t2_seconds, len(verifiers))
    result = param_gen(verifiers, new_T, security_k, epoch_id=current.epoch_id + 1,
                       **param_gen_kw)
    for v in verifiers:
        v.reset_lists()
    cfg = EpochConfig(current.epoch_id + 1, new_T, result.pp.modulus, c.recommended_tip_pct,
                      c.freshness_threshold, new_T * c.seconds_per_step, c.t2_seconds,
                      len(verifiers))
    return cfg, result


# -- user --------------------------------------------------------------------

def user_prepare_intent(user_addr: str, function_name: str, contract_addr: str,
                        keypair: KeyPair) -> UserTxIntent:
    details = TxDetails(user_addr, function_name, contract_addr)
    h = details.digest()
    return UserTxIntent(details, h, aggsig.sign(keypair, h), keypair)


def challenge_signers(bundle: SignedBundle, verifier_set: Mapping[str, bytes], ell: int,
                      digest: bytes, block_curr: int) -> set[str]:
    out = set()
    for m, pk in zip(bundle.messages, bundle.public_keys):
        c = parse_challenge(m)
        if (c is not None and (c.ell, c.digest, c.block_curr) == (ell, digest, block_curr)
                and verifier_set.get(c.verifier_id) == pk):
            out.add(c.verifier_id)
    return out


def accept_signers(bundle: SignedBundle, verifier_set: Mapping[str, bytes], ell: int) -> set[str]:
    out = set()
    for m, pk in zip(bundle.messages, bundle.public_keys):
        a = parse_accept(m)
        if a is not None and a.ell == ell and verifier_set.get(a.verifier_id) == pk:
            out.add(a.verifier_id)
    return out


def pp_endorsers(pp: PublicParams, pp_sigs: Mapping[str, Signature],
                 verifier_set: Mapping[str, bytes]) -> set[str]:
    msg = pp.message()
    return {vid for vid, s in pp_sigs.items()
            if vid in verifier_set and aggsig.verify(verifier_set[vid], msg, s)}


def user_eval_and_submit_proof(intent: UserTxIntent, record: ChallengeRecord,
                               bundle: Optional[SignedBundle], pp: PublicParams,
                               pp_sigs: Mapping[str, Signature],
                               verifier_set: Mapping[str, bytes]) -> Optional[VdfProof]:
    """Check M_agg and the pp signatures, then run the VDF on input l."""
    n = len(verifier_set)
    if bundle is None or not bundle.messages:
        return None
    j = challenge_signers(bundle, verifier_set, record.ell, intent.digest, record.block_at_issue)
    if 2 * len(j) <= n:
        return None
    if 2 * len(pp_endorsers(pp, pp_sigs, verifier_set)) <= n:
        return None
    if not aggsig.aggregate_verify(bundle):
        return None
    try:
        proof = vdf_eval(pp.vdf, record.ell)
    except VdfError:
        return None
    record.advance(EVALUATED)
    return proof


def user_build_tx(intent: UserTxIntent, record: ChallengeRecord, challenge_bundle: SignedBundle,
                  accept_bundle: Optional[SignedBundle], verifier_set: Mapping[str, bytes],
                  declared_tip_pct: float = 0.0) -> Optional[FirstTransaction]:
    n = len(verifier_set)
    if accept_bundle is None or not accept_bundle.messages:
        return None
    if 2 * len(accept_signers(accept_bundle, verifier_set, record.ell)) <= n:
        return None
    if not aggsig.aggregate_verify(accept_bundle):
        return None
    payload = FirstTransaction.payload(intent.details, challenge_bundle, accept_bundle,
                                       record.ell, record.block_at_issue)
    record.advance(CONSUMED)
    return FirstTransaction(aggsig.sign(intent.keypair, payload), intent.details,
                            challenge_bundle, accept_bundle, intent.public_key, record.ell,
                            record.block_at_issue, declared_tip_pct)


# -- coordinator ---------------------------------------------------------------

def coordinator_issue(coord: CoordinatorState, digest: bytes, block_now: int) -> ChallengeRecord:
    """Pick a fresh 2k-bit prime l for one user request."""
    while True:
        ell = random_prime(2 * coord.security_k, coord.rng)
        if ell not in coord.handed_out:
            break
    coord.handed_out.append(ell)
    return ChallengeRecord(ell, digest, block_now)


def challenge_expectation(ell: int, digest: bytes, block_curr: int):
    def check(e: Endorsement) -> bool:
        c = parse_challenge(e.message)
        return (c is not None and c.verifier_id == e.verifier_id
                and (c.ell, c.digest, c.block_curr) == (ell, digest, block_curr))
    return check


def accept_expectation(ell: int):
    def check(e: Endorsement) -> bool:
        a = parse_accept(e.message)
        return a is not None and a.verifier_id == e.verifier_id and a.ell == ell
    return check


def coordinator_aggregate(responses: Iterable[Optional[Endorsement]],
                          verifier_set: Mapping[str, bytes],
                          expect: Optional[Callable[[Endorsement], bool]] = None
                          ) -> Optional[SignedBundle]:
    """Verify each response, keep the valid ones, aggregate iff they are a majority.

    A response counts when its sender is registered and not already counted,
    its content is what this phase asked for, and its signature verifies.
    """
    valid: dict[str, Endorsement] = {}
    for e in responses:
        if e is None or e.verifier_id not in verifier_set or e.verifier_id in valid:
            continue
        if expect is not None and not expect(e):
            continue
        if aggsig.verify(verifier_set[e.verifier_id], e.message, e.signature):
            valid[e.verifier_id] = e
    if 2 * len(valid) <= len(verifier_set):
        return None
    chosen = [valid[k] for k in sorted(valid)]
    bundle = aggsig.aggregate([e.message for e in chosen], [e.signature for e in chosen])
    return bundle.with_keys([verifier_set[e.verifier_id] for e in chosen])


# -- verifier ------------------------------------------------------------------

def verifier_endorse_challenge(state: VerifierState, digest: bytes, ell: int,
                               user_sig: Signature, user_pk: bytes,
                               block_curr: int) -> Optional[Endorsement]:
    if ell in state.issued or ell in state.used:
        return None
    if not aggsig.verify(user_pk, digest, user_sig):
        return None
    msg = challenge_message(ell, digest, state.vid, block_curr)
    state.issued.add(ell)
    return Endorsement(state.vid, msg, aggsig.sign(state.keypair, msg))


def verifier_endorse_proof(state: VerifierState, ell: int,
                           proof: Optional[VdfProof]) -> Optional[Endorsement]:
    if ell in state.used or ell not in state.issued:
        return None
    # burn l before checking the proof: a failed proof still consumes it
    state.used.add(ell)
    if proof is None or state.pp is None or proof.x != ell:
        return None
    if not vdf_verify(state.pp.vdf, proof):
        return None
    msg = accept_message(state.vid, ell)
    return Endorsement(state.vid, msg, aggsig.sign(state.keypair, msg))
