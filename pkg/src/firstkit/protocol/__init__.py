"""Actor state machines for system setup, parameter generation and the
challenge/proof exchange between user, coordinator and verifiers."""

from .federation import Attempt, Federation, SessionResult
from .ops import (
    ParamGenResult, accept_expectation, challenge_expectation, coordinator_aggregate,
    coordinator_issue, epoch_rotate, param_gen, system_setup, user_build_tx,
    user_eval_and_submit_proof, user_prepare_intent, verifier_endorse_challenge,
    verifier_endorse_proof,
)
from .state import (
    CONSUMED, EVALUATED, ISSUED, ChallengeRecord, CoordinatorState, EpochConfig,
    EpochConstraints, PublicParams, UserTxIntent, VerifierState, random_prime,
)
from .transcript import Transcript, TranscriptEntry

__all__ = [
    "Attempt", "Federation", "SessionResult", "ParamGenResult", "accept_expectation",
    "challenge_expectation", "coordinator_aggregate", "coordinator_issue", "epoch_rotate",
    "param_gen", "system_setup", "user_build_tx", "user_eval_and_submit_proof",
    "user_prepare_intent", "verifier_endorse_challenge", "verifier_endorse_proof",
    "CONSUMED", "EVALUATED", "ISSUED", "ChallengeRecord", "CoordinatorState", "EpochConfig",
    "EpochConstraints", "PublicParams", "UserTxIntent", "VerifierState", "random_prime",
    "Transcript", "TranscriptEntry",
]
