"""BGLS aggregate signatures on BLS12-381.

Signatures live in G1 (48-byte compressed), public keys in G2 (96-byte
compressed), matching the distinct-message aggregate scheme: ``sigma = H(m)^x``,
``e(sigma, g2) == e(H(m), v)``, and for an aggregate over distinct messages
``e(sigma_agg, g2) == prod_i e(H(m_i), v_i)``.

Hashing to G1 is the standard ``BLS12381G1_XMD:SHA-256_SSWU_RO_`` suite with
the domain separation tag ``FIRST-AGGSIG-v1``. Field hashing and the SSWU map
come from py_ecc; point arithmetic and pairings run on the arkworks bindings.

Points are passed around in their compressed encodings (ZCash flag format)
so every public value is hashable, comparable and serialisable as-is.
Secret scalars serialise as 32-byte big-endian integers.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import gmpy2
from py_arkworks_bls12381 import G1Point, G2Point, GT, Scalar
from py_ecc.bls.hash_to_curve import hash_to_field_FQ
from py_ecc.optimized_bls12_381 import curve_order, field_modulus
from py_ecc.optimized_bls12_381 import constants as _iso

from .errors import Empty, LengthMismatch

DST = b"FIRST-AGGSIG-v1"
G1_BYTES = 48
G2_BYTES = 96
SCALAR_BYTES = 32
CURVE_ORDER = curve_order

_G2_GEN = G2Point()
_KEYGEN_SALT = b"FIRST-KEYGEN-v1"


# -- point codecs --------------------------------------------------------------

def _g1_bytes(p: G1Point) -> bytes:
    return bytes(p.to_compressed_bytes())


def _g2_bytes(p: G2Point) -> bytes:
    return bytes(p.to_compressed_bytes())


@lru_cache(maxsize=8192)
def _g1_point(data: bytes) -> G1Point:
    if len(data) != G1_BYTES:
        raise ValueError("bad G1 length")
    return G1Point.from_compressed_bytes(data)


@lru_cache(maxsize=4096)
def _g2_point(data: bytes) -> G2Point:
    if len(data) != G2_BYTES:
        raise ValueError("bad G2 length")
    v = G2Point.from_compressed_bytes(data)
    if v == G2Point.identity():
        # the identity key verifies the identity signature on every message
        raise ValueError("identity public key")
    return v


def is_valid_g1(data: bytes) -> bool:
    """On-curve, in the prime-order subgroup and correctly encoded."""
    try:
        _g1_point(bytes(data))
    except (ValueError, TypeError):
        return False
    return True


def is_valid_g2(data: bytes) -> bool:
    try:
        _g2_point(bytes(data))
    except (ValueError, TypeError):
        return False
    return True


# Simplified SWU onto the 11-isogenous curve, then the isogeny back to E.
# Same map and constants as py_ecc, but on plain integers with gmpy2 powmod:
# py_ecc's field classes made hashing the bottleneck of every protocol round.
_P = gmpy2.mpz(field_modulus)
_A = gmpy2.mpz(_iso.ISO_11_A.n)
_B = gmpy2.mpz(_iso.ISO_11_B.n)
_Z = gmpy2.mpz(_iso.ISO_11_Z.n)
_SQRT_M11_CUBED = gmpy2.mpz(_iso.SQRT_MINUS_11_CUBED.n)
_ISO_COEFFS = [[gmpy2.mpz(c.n) for c in k] for k in _iso.ISO_11_MAP_COEFFICIENTS]
_H_EFF = _iso.H_EFF_G1


def _swu(t):
    p = _P
    t2 = t * t % p
    zt2 = _Z * t2 % p
    temp = (zt2 + zt2 * zt2) % p
    den = -_A * temp % p
    num = _B * (temp + 1) % p
    if den == 0:
        den = _Z * _A % p
    v = pow(den, 3, p)
    u = (pow(num, 3, p) + _A * num * den * den + _B * v) % p
    uv = u * v % p
    y = uv * gmpy2.powmod(uv * v * v % p, (p - 3) // 4, p) % p
    if (y * y * v - u) % p != 0:
        y = y * t2 * t % p * _SQRT_M11_CUBED % p
        num = num * zt2 % p
    if t % 2 != y % 2:
        y = -y % p
    return num, y * den % p, den


def _iso_map(x, y, z):
    p = _P
    zp = [z]
    for _ in range(14):
        zp.append(zp[-1] * z % p)
    vals = []
    for k in _ISO_COEFFS:
        acc = k[-1]
        for j, c in enumerate(reversed(k[:-1])):
            acc = (acc * x + zp[j] * c) % p
        vals.append(acc)
    xn, xd, yn, yd = vals
    xd = xd * z % p
    yn = yn * y % p
    yd = yd * z % p
    return xn * yd % p, xd * yn % p, xd * yd % p


def _fq_to_g1(u: int) -> G1Point:
    x, y, z = _iso_map(*_swu(gmpy2.mpz(u)))
    zi = gmpy2.invert(z, _P)
    x, y = int(x * zi % _P), int(y * zi % _P)
    flags = 0x80 | (0x20 if y > (field_modulus - 1) // 2 else 0)
    raw = x.to_bytes(G1_BYTES, "big")
    # the mapped point is on E but generally outside the r-torsion
    return G1Point.from_compressed_bytes_unchecked(bytes([raw[0] | flags]) + raw[1:])


@lru_cache(maxsize=16384)
def _hash_to_g1_point(message: bytes) -> G1Point:
    u0, u1 = hash_to_field_FQ(message, 2, DST, hashlib.sha256)
    return (_fq_to_g1(u0.n) + _fq_to_g1(u1.n)) * Scalar(_H_EFF)


def hash_to_g1(message: bytes) -> bytes:
    """Compressed encoding of H(message) in G1."""
    return _g1_bytes(_hash_to_g1_point(bytes(message)))


# -- types ---------------------------------------------------------------------

@dataclass(frozen=True)
class KeyPair:
    secret: int
    public: bytes

    def __repr__(self) -> str:
        return f"KeyPair(public={self.public.hex()[:16]}...)"

    def secret_bytes(self) -> bytes:
        return self.secret.to_bytes(SCALAR_BYTES, "big")

    @classmethod
    def from_secret(cls, secret: int) -> "KeyPair":
        if not 0 < secret < CURVE_ORDER:
            raise ValueError("secret scalar out of range")
        return cls(secret, _g2_bytes(_G2_GEN * Scalar(secret)))

    @classmethod
    def from_secret_bytes(cls, data: bytes) -> "KeyPair":
        if len(data) != SCALAR_BYTES:
            raise ValueError("secret must be 32 bytes")
        return cls.from_secret(int.from_bytes(data, "big"))


@dataclass(frozen=True)
class Signature:
    sigma: bytes

    def __post_init__(self):
        if len(self.sigma) != G1_BYTES:
            raise ValueError("signature must be a 48-byte compressed G1 point")


@dataclass(frozen=True)
class SignedBundle:
    """Aggregate signature plus the ordered messages and signer keys it covers."""

    agg_sigma: bytes
    messages: tuple[bytes, ...]
    public_keys: tuple[bytes, ...] = ()

    def __len__(self) -> int:
        return len(self.messages)

    def with_keys(self, public_keys: Sequence[bytes]) -> "SignedBundle":
        return SignedBundle(self.agg_sigma, self.messages, tuple(bytes(k) for k in public_keys))

    def to_dict(self) -> dict:
        return {"agg_sigma": self.agg_sigma.hex(),
                "messages": [m.hex() for m in self.messages],
                "public_keys": [k.hex() for k in self.public_keys]}

    @classmethod
    def from_dict(cls, d: dict) -> "SignedBundle":
        return cls(bytes.fromhex(d["agg_sigma"]),
                   tuple(bytes.fromhex(m) for m in d["messages"]),
                   tuple(bytes.fromhex(k) for k in d["public_keys"]))


# -- scheme --------------------------------------------------------------------

def _seed_bytes(seed) -> bytes:
    if seed is None:
        return secrets.token_bytes(32)
    if isinstance(seed, int):
        if seed < 0:
            raise ValueError("integer seeds must be non-negative")
        return seed.to_bytes(max(1, (seed.bit_length() + 7) // 8), "big")
    if isinstance(seed, str):
        return seed.encode("utf-8")
    return bytes(seed)


def keygen(seed=None) -> KeyPair:
    """Key pair from ``seed`` (int, str or bytes); fresh OS entropy when None.

    The secret is HKDF-SHA256(seed) expanded to 48 bytes and reduced into
    [1, r), which keeps the reduction bias below 2^-128.
    """
    prk = hmac.new(_KEYGEN_SALT, _seed_bytes(seed), hashlib.sha256).digest()
    okm = b""
    block = b""
    i = 1
    while len(okm) < 48:
        block = hmac.new(prk, block + b"FIRST-SK" + bytes([i]), hashlib.sha256).digest()
        okm += block
        i += 1
    secret = int.from_bytes(okm[:48], "big") % (CURVE_ORDER - 1) + 1
    return KeyPair.from_secret(secret)


def sign(kp: KeyPair, message: bytes) -> Signature:
    return Signature(_g1_bytes(_hash_to_g1_point(bytes(message)) * Scalar(kp.secret)))


def _sigma_bytes(sig) -> bytes:
    return sig.sigma if isinstance(sig, Signature) else bytes(sig)


def verify(public_key: bytes, message: bytes, sig) -> bool:
    try:
        return _verify(bytes(public_key), bytes(message), bytes(_sigma_bytes(sig)))
    except TypeError:
        return False


@lru_cache(maxsize=8192)
def _verify(public_key: bytes, message: bytes, sigma: bytes) -> bool:
    # pure in its inputs; the same pp signatures get rechecked every session
    try:
        s = _g1_point(sigma)
        v = _g2_point(public_key)
    except (ValueError, TypeError):
        return False
    h = _hash_to_g1_point(message)
    return GT.multi_pairing([s, -h], [_G2_GEN, v]) == GT.one()


def aggregate(messages: Sequence[bytes], signatures: Sequence) -> SignedBundle:
    """Multiply signatures in G1. Keys are attached with :meth:`SignedBundle.with_keys`."""
    if len(messages) != len(signatures):
        raise LengthMismatch(f"{len(messages)} messages vs {len(signatures)} signatures")
    if not messages:
        raise Empty("nothing to aggregate")
    acc = G1Point.identity()
    for s in signatures:
        acc = acc + _g1_point(_sigma_bytes(s))
    return SignedBundle(_g1_bytes(acc), tuple(bytes(m) for m in messages))


def aggregate_verify(bundle: SignedBundle) -> bool:
    msgs = bundle.messages
    keys = bundle.public_keys
    if not msgs or len(msgs) != len(keys):
        return False
    if len(set(msgs)) != len(msgs):
        return False
    try:
        agg = _g1_point(bytes(bundle.agg_sigma))
        vs = [_g2_point(bytes(k)) for k in keys]
    except (ValueError, TypeError):
        return False
    g1s = [agg] + [-_hash_to_g1_point(m) for m in msgs]
    g2s = [_G2_GEN] + vs
    return GT.multi_pairing(g1s, g2s) == GT.one()


def random_g1(rng=None) -> bytes:
    """A uniformly random subgroup element; handy for forgery probes."""
    k = (rng.randrange(1, CURVE_ORDER) if rng is not None
         else secrets.randbelow(CURVE_ORDER - 1) + 1)
    return _g1_bytes(G1Point() * Scalar(k))
