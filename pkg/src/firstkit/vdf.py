"""Wesolowski verifiable delay function over Z_N^*.

The group order is unknown to every party (N arrives from the federated
parameter generation in :mod:`firstkit.protocol`), so evaluation is forced
through ``T`` sequential squarings while verification costs two modular
exponentiations with ~``fs_bits``-bit exponents.

- :func:`vdf_setup`    validate (k, T, N) into :class:`VdfParams`
- :func:`vdf_eval`     y = x^(2^T) mod N and the proof pi = x^floor(2^T / l)
- :func:`vdf_verify`   accept iff pi^l * x^(2^T mod l) == y (mod N)
- :func:`hash_to_prime` Fiat-Shamir challenge prime l = H(x, y, T, N)

All functions are pure; they hold no shared state and are thread-safe.
"""

from __future__ import annotations

import hashlib
import gc
import statistics
import time
from dataclasses import dataclass
from typing import Iterable

import gmpy2
import numpy as np

from .encoding import encode
from .errors import DifficultyOverflow, EvenModulus, InputOutOfRange, TinyModulus

DEFAULT_FS_BITS = 128
MR_ROUNDS = 64
MAX_DIFFICULTY = 1 << 64

_FS_TAG = b"FIRST-VDF-FS-v1"
_H2P_TAG = b"FIRST-H2P-v1"


def _small_primes(limit: int) -> tuple[int, ...]:
    out = []
    p = gmpy2.mpz(2)
    while p <= limit:
        out.append(int(p))
        p = gmpy2.next_prime(p)
    return tuple(out)


SMALL_PRIMES = _small_primes(257)


def is_probable_prime(n: int, rounds: int = MR_ROUNDS) -> bool:
    """Miller-Rabin with ``rounds`` repetitions (GMP's ``mpz_probab_prime_p``)."""
    if n < 2:
        return False
    return bool(gmpy2.is_prime(n, rounds))


def hash_to_prime(data: bytes, bits: int = DEFAULT_FS_BITS) -> int:
    """Deterministically map ``data`` to an odd prime of exactly ``bits`` bits.

    SHAKE-256 over (tag, bits, data, counter); the top and bottom bits of each
    candidate are forced, and the counter advances until a candidate passes
    Miller-Rabin.
    """
    if not data:
        raise ValueError("hash_to_prime needs a non-empty byte string")
    if bits < 3:
        raise ValueError("bits must be >= 3")
    nbytes = (bits + 7) // 8
    shift = nbytes * 8 - bits
    counter = 0
    while True:
        digest = hashlib.shake_256(encode(_H2P_TAG, bits, data, counter)).digest(nbytes)
        cand = (int.from_bytes(digest, "big") >> shift) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand):
            return cand
        counter += 1


@dataclass(frozen=True)
class VdfParams:
    modulus: int
    difficulty: int
    security_k: int

    def to_dict(self) -> dict:
        return {"modulus": str(self.modulus), "difficulty": self.difficulty,
                "security_k": self.security_k}

    @classmethod
    def from_dict(cls, d: dict) -> "VdfParams":
        return vdf_setup(int(d["security_k"]), int(d["difficulty"]), int(d["modulus"]))


@dataclass(frozen=True)
class VdfProof:
    x: int
    y: int
    pi: int
    challenge: int

    def to_dict(self) -> dict:
        return {k: str(v) for k, v in (("x", self.x), ("y", self.y), ("pi", self.pi),
                                       ("challenge", self.challenge))}

    @classmethod
    def from_dict(cls, d: dict) -> "VdfProof":
        return cls(int(d["x"]), int(d["y"]), int(d["pi"]), int(d["challenge"]))


def vdf_setup(security_k: int, difficulty: int, modulus: int) -> VdfParams:
    if modulus % 2 == 0:
        raise EvenModulus(f"modulus must be odd, got {modulus}")
    if modulus <= 3:
        raise TinyModulus(f"modulus must exceed 3, got {modulus}")
    if not 0 <= difficulty < MAX_DIFFICULTY:
        raise DifficultyOverflow(f"difficulty must lie in [0, 2**64), got {difficulty}")
    if security_k <= 0:
        raise ValueError("security_k must be positive")
    return VdfParams(int(modulus), int(difficulty), int(security_k))


def _shares_small_factor(value: int, modulus: int) -> bool:
    # a full gcd would factor N; only screen the cheap cases
    return any(modulus % p == 0 and value % p == 0 for p in SMALL_PRIMES)


def _element_ok(value: int, modulus: int) -> bool:
    return 1 <= value < modulus and not _shares_small_factor(value, modulus)


def fs_challenge(params: VdfParams, x: int, y: int, bits: int = DEFAULT_FS_BITS) -> int:
    return hash_to_prime(encode(_FS_TAG, x, y, params.difficulty, params.modulus), bits)


def _square_chain(x: int, steps: int, modulus: int) -> int:
    n = gmpy2.mpz(modulus)
    y = gmpy2.mpz(x)
    for _ in range(steps):
        y = y * y % n
    return int(y)


def _quotient_power(x: int, steps: int, ell: int, modulus: int) -> int:
    """x^floor(2^steps / ell) mod N by long division in the exponent.

    Keeps the running remainder of 2^i mod ell and emits one quotient bit per
    step, so 2^steps is never materialised.
    """
    n = gmpy2.mpz(modulus)
    g = gmpy2.mpz(x)
    pi = gmpy2.mpz(1)
    r = 1
    for _ in range(steps):
        r <<= 1
        if r >= ell:
            r -= ell
            pi = pi * pi % n * g % n
        else:
            pi = pi * pi % n
    return int(pi)


def vdf_eval(params: VdfParams, x: int, fs_bits: int = DEFAULT_FS_BITS) -> VdfProof:
    n = params.modulus
    if not (1 < x < n) or _shares_small_factor(x, n):
        raise InputOutOfRange(f"input must lie in (1, N) and avoid small factors of N; got {x}")
    y = _square_chain(x, params.difficulty, n)
    ell = fs_challenge(params, x, y, fs_bits)
    pi = _quotient_power(x, params.difficulty, ell, n)
    return VdfProof(x=x, y=y, pi=pi, challenge=ell)


def vdf_verify(params: VdfParams, proof: VdfProof, fs_bits: int = DEFAULT_FS_BITS) -> bool:
    """Return True to accept. Malformed proofs are rejected, never raised."""
    try:
        n = params.modulus
        x, y, pi, ell = (int(v) for v in (proof.x, proof.y, proof.pi, proof.challenge))
    except (AttributeError, TypeError, ValueError):
        return False
    if not (1 < x < n) or not _element_ok(x, n):
        return False
    if not (_element_ok(y, n) and _element_ok(pi, n)):
        return False
    if ell != fs_challenge(params, x, y, fs_bits):
        return False
    r = pow(2, params.difficulty, ell)
    lhs = gmpy2.powmod(pi, ell, n) * gmpy2.powmod(x, r, n) % n
    return int(lhs) == y


@dataclass(frozen=True)
class BenchRow:
    difficulty: int
    eval_s: float
    verify_s: float


def bench(modulus: int, difficulties: Iterable[int], x: int = 3, repeats: int = 5,
          security_k: int = 64) -> list[BenchRow]:
    """Median-of-``repeats`` wall time of eval and verify at each difficulty.

    Repeats run round-robin over the difficulties so slow drift in machine
    speed lands on every point alike; the collector is paused while timing.
    """
    ts = list(difficulties)
    params = [vdf_setup(security_k, t, modulus) for t in ts]
    evals: list[list[float]] = [[] for _ in ts]
    verifies: list[list[float]] = [[] for _ in ts]
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            for i, p in enumerate(params):
                t0 = time.perf_counter()
                proof = vdf_eval(p, x)
                t1 = time.perf_counter()
                ok = vdf_verify(p, proof)
                t2 = time.perf_counter()
                if not ok:
                    raise AssertionError("honest proof rejected during bench")
                evals[i].append(t1 - t0)
                verifies[i].append(t2 - t1)
    finally:
        if gc_was_on:
            gc.enable()
    return [BenchRow(t, statistics.median(e), statistics.median(v))
            for t, e, v in zip(ts, evals, verifies)]


def linear_r2(xs: Iterable[float], ys: Iterable[float]) -> float:
    """Coefficient of determination of the least-squares line through (xs, ys)."""
    xa = np.asarray(list(xs), dtype=float)
    ya = np.asarray(list(ys), dtype=float)
    slope, icept = np.polyfit(xa, ya, 1)
    resid = ya - (slope * xa + icept)
    ss_tot = float(((ya - ya.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0
    return 1.0 - float((resid ** 2).sum()) / ss_tot
