"""Wire formats for every signed or hashed protocol message.

All messages use :mod:`firstkit.encoding` with a leading domain tag:

======================  ==================================================
transaction details     ``("FIRST/MA/v1", addr_A, f_name, addr_SC)``
challenge endorsement   ``("FIRST/Mi/v1", l, h, verifier_id, block_curr)``
proof endorsement       ``("FIRST/Mi'/v1", "accept", verifier_id, l)``
public parameters       ``("FIRST/pp/v1", epoch_id, N, T, k)``
final payload M'        ``("FIRST/M'/v1", M_A, M_agg, M'_agg, l, block_curr)``
======================  ==================================================

The digest ``h`` is SHA-256 of the encoded transaction details.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

from .aggsig import Signature, SignedBundle
from .encoding import bytes_to_int, decode, encode, encode_seq

TAG_DETAILS = "FIRST/MA/v1"
TAG_CHALLENGE = "FIRST/Mi/v1"
TAG_ACCEPT = "FIRST/Mi'/v1"
TAG_PARAMS = "FIRST/pp/v1"
TAG_PAYLOAD = "FIRST/M'/v1"
ACCEPT = "accept"


@dataclass(frozen=True)
class TxDetails:
    """The secret transaction tuple M_A; revealed only inside the final tx."""

    user_addr: str
    function_name: str
    contract_addr: str

    def encode(self) -> bytes:
        return encode(TAG_DETAILS, self.user_addr, self.function_name, self.contract_addr)

    def digest(self) -> bytes:
        return hashlib.sha256(self.encode()).digest()


def details_digest(user_addr: str, function_name: str, contract_addr: str) -> bytes:
    return TxDetails(user_addr, function_name, contract_addr).digest()


@dataclass(frozen=True)
class ChallengeMsg:
    ell: int
    digest: bytes
    verifier_id: str
    block_curr: int


@dataclass(frozen=True)
class AcceptMsg:
    verifier_id: str
    ell: int


def challenge_message(ell: int, digest: bytes, verifier_id: str, block_curr: int) -> bytes:
    return encode(TAG_CHALLENGE, ell, digest, verifier_id, block_curr)


def accept_message(verifier_id: str, ell: int) -> bytes:
    return encode(TAG_ACCEPT, ACCEPT, verifier_id, ell)


def parse_challenge(data: bytes) -> Optional[ChallengeMsg]:
    try:
        f = decode(data)
    except ValueError:
        return None
    if len(f) != 5 or f[0] != TAG_CHALLENGE.encode():
        return None
    try:
        vid = f[3].decode("utf-8")
    except UnicodeDecodeError:
        return None
    return ChallengeMsg(bytes_to_int(f[1]), f[2], vid, bytes_to_int(f[4]))


def parse_accept(data: bytes) -> Optional[AcceptMsg]:
    try:
        f = decode(data)
    except ValueError:
        return None
    if len(f) != 4 or f[0] != TAG_ACCEPT.encode() or f[1] != ACCEPT.encode():
        return None
    try:
        vid = f[2].decode("utf-8")
    except UnicodeDecodeError:
        return None
    return AcceptMsg(vid, bytes_to_int(f[3]))


def params_message(epoch_id: int, modulus: int, difficulty: int, security_k: int) -> bytes:
    return encode(TAG_PARAMS, epoch_id, modulus, difficulty, security_k)


def encode_bundle(bundle: SignedBundle) -> bytes:
    return encode(bundle.agg_sigma, encode_seq(bundle.messages), encode_seq(bundle.public_keys))


@dataclass(frozen=True)
class Endorsement:
    """One verifier's signed response (M_i, sigma_Vi) or (M'_i, sigma'_Vi)."""

    verifier_id: str
    message: bytes
    signature: Signature


@dataclass(frozen=True)
class FirstTransaction:
    """tx_A = (sigma'_A, M', pk_A).

    ``challenge`` and ``block_curr`` name the (l, block_curr) pair inside M_agg
    the transaction claims; they are part of the signed payload.
    """

    user_sig: Signature
    details: TxDetails
    challenge_bundle: SignedBundle
    accept_bundle: SignedBundle
    user_pk: bytes
    challenge: int
    block_curr: int
    declared_tip_pct: float = 0.0
    _hash: bytes = field(default=b"", repr=False, compare=False)

    @staticmethod
    def payload(details: TxDetails, challenge_bundle: SignedBundle, accept_bundle: SignedBundle,
                challenge: int, block_curr: int) -> bytes:
        return encode(TAG_PAYLOAD, details.encode(), encode_bundle(challenge_bundle),
                      encode_bundle(accept_bundle), challenge, block_curr)

    def payload_bytes(self) -> bytes:
        return self.payload(self.details, self.challenge_bundle, self.accept_bundle,
                            self.challenge, self.block_curr)

    def tx_hash(self) -> bytes:
        if not self._hash:
            h = hashlib.sha256(encode(self.user_sig.sigma, self.payload_bytes(), self.user_pk))
            object.__setattr__(self, "_hash", h.digest())
        return self._hash

    def to_dict(self) -> dict:
        return {
            "user_sig": self.user_sig.sigma.hex(),
            "details": {"user_addr": self.details.user_addr,
                        "function_name": self.details.function_name,
                        "contract_addr": self.details.contract_addr},
            "challenge_bundle": self.challenge_bundle.to_dict(),
            "accept_bundle": self.accept_bundle.to_dict(),
            "user_pk": self.user_pk.hex(),
            "challenge": str(self.challenge),
            "block_curr": self.block_curr,
            "declared_tip_pct": self.declared_tip_pct,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FirstTransaction":
        return cls(
            user_sig=Signature(bytes.fromhex(d["user_sig"])),
            details=TxDetails(**d["details"]),
            challenge_bundle=SignedBundle.from_dict(d["challenge_bundle"]),
            accept_bundle=SignedBundle.from_dict(d["accept_bundle"]),
            user_pk=bytes.fromhex(d["user_pk"]),
            challenge=int(d["challenge"]),
            block_curr=int(d["block_curr"]),
            declared_tip_pct=float(d.get("declared_tip_pct", 0.0)),
        )
