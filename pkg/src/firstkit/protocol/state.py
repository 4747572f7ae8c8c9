"""Actor state and epoch configuration."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

import gmpy2

from ..aggsig import KeyPair, Signature
from ..errors import EpochConstraintViolated, EvenVerifierCount
from ..messages import TxDetails, params_message
from ..vdf import VdfParams

ISSUED = "issued"
EVALUATED = "evaluated"
CONSUMED = "consumed"
_STAGE = {ISSUED: 0, EVALUATED: 1, CONSUMED: 2}


def random_prime(bits: int, rng: random.Random) -> int:
    """Uniform-ish prime of exactly ``bits`` bits with the top two bits set."""
    if bits < 3:
        raise ValueError("bits must be >= 3")
    top = (1 << (bits - 1)) | (1 << (bits - 2))
    while True:
        cand = rng.getrandbits(bits) | top | 1
        if gmpy2.is_prime(cand, 64):
            return cand


@dataclass(frozen=True)
class PublicParams:
    """pp for one epoch: the VDF instance plus the shares that built N."""

    epoch_id: int
    vdf: VdfParams
    shares: tuple[int, ...] = ()

    @property
    def modulus(self) -> int:
        return self.vdf.modulus

    @property
    def difficulty(self) -> int:
        return self.vdf.difficulty

    def message(self) -> bytes:
        return params_message(self.epoch_id, self.vdf.modulus, self.vdf.difficulty,
                              self.vdf.security_k)

    def to_dict(self) -> dict:
        return {"epoch_id": self.epoch_id, "vdf": self.vdf.to_dict(),
                "shares": [str(s) for s in self.shares],
                "modulus_provenance": "sum of verifier prime shares"}


@dataclass
class VerifierState:
    vid: str
    keypair: KeyPair
    rng: random.Random
    issued: set[int] = field(default_factory=set)
    used: set[int] = field(default_factory=set)
    pp: Optional[PublicParams] = None
    share: Optional[int] = None

    @property
    def public_key(self) -> bytes:
        return self.keypair.public

    def reset_lists(self) -> None:
        self.issued.clear()
        self.used.clear()


@dataclass
class CoordinatorState:
    """Bookkeeping of the (untrusted) coordinator; it enforces nothing."""

    vid: str
    rng: random.Random
    security_k: int
    handed_out: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class UserTxIntent:
    details: TxDetails
    digest: bytes
    user_sig: Signature
    keypair: KeyPair

    @property
    def public_key(self) -> bytes:
        return self.keypair.public


@dataclass
class ChallengeRecord:
    ell: int
    digest: bytes
    block_at_issue: int
    state: str = ISSUED

    def advance(self, new_state: str) -> None:
        if _STAGE[new_state] < _STAGE[self.state]:
            raise ValueError(f"challenge state cannot go from {self.state} to {new_state}")
        self.state = new_state


@dataclass(frozen=True)
class EpochConstraints:
    """Inputs to an epoch rotation besides the new difficulty."""

    seconds_per_step: float = 1.0
    t2_seconds: float = 0.0
    recommended_tip_pct: float = 20.0
    freshness_threshold: int = 5


@dataclass(frozen=True)
class EpochConfig:
    epoch_id: int
    difficulty_T: int
    modulus_N: int
    recommended_tip_pct: float
    freshness_threshold: int
    t1_seconds: float
    t2_seconds: float
    verifier_count: int

    def __post_init__(self):
        if self.verifier_count % 2 == 0:
            raise EvenVerifierCount(f"verifier count must be odd, got {self.verifier_count}")
        if not self.t1_seconds > self.t2_seconds:
            raise EpochConstraintViolated(
                f"t1={self.t1_seconds}s must exceed t2={self.t2_seconds}s")
        if self.freshness_threshold < 0:
            raise EpochConstraintViolated("freshness threshold must be non-negative")

    def to_dict(self) -> dict:
        return {"epoch_id": self.epoch_id, "difficulty_T": self.difficulty_T,
                "modulus_N": str(self.modulus_N), "recommended_tip_pct": self.recommended_tip_pct,
                "freshness_threshold": self.freshness_threshold, "t1_seconds": self.t1_seconds,
                "t2_seconds": self.t2_seconds, "verifier_count": self.verifier_count}
