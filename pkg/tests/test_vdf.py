import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from firstkit import vdf
from firstkit.errors import DifficultyOverflow, EvenModulus, InputOutOfRange, TinyModulus
from firstkit.vdf import VdfProof, hash_to_prime, vdf_eval, vdf_setup, vdf_verify

SMALL_N = 1049 + 1061 + 1063


# independent oracles: plain big-int arithmetic, no streaming

def oracle_eval(n, t, x, ell):
    y = x
    for _ in range(t):
        y = y * y % n
    return y, pow(x, (1 << t) // ell, n)


def oracle_accepts(n, t, x, y, pi, ell):
    return pow(pi, ell, n) * pow(x, (1 << t) % ell, n) % n == y


def test_shares_sum_to_small_modulus():
    assert all(sympy.isprime(p) for p in (1049, 1061, 1063))
    assert SMALL_N == 3173


def test_setup_examples():
    assert vdf_setup(16, 4, 3173) == vdf.VdfParams(3173, 4, 16)
    assert vdf_setup(16, 0, 15) == vdf.VdfParams(15, 0, 16)
    with pytest.raises(EvenModulus):
        vdf_setup(16, 4, 16)
    with pytest.raises(TinyModulus):
        vdf_setup(16, 4, 3)
    with pytest.raises(DifficultyOverflow):
        vdf_setup(16, 2**64, 3173)
    with pytest.raises(DifficultyOverflow):
        vdf_setup(16, -1, 3173)


def test_zero_difficulty_is_identity():
    p = vdf_eval(vdf_setup(16, 0, 15), 7)
    assert p.y == 7


def test_small_instance_matches_oracle():
    params = vdf_setup(16, 4, SMALL_N)
    p = vdf_eval(params, 2)
    assert p.y == pow(2, 2**4, SMALL_N) == 2076
    assert (p.y, p.pi) == oracle_eval(SMALL_N, 4, 2, p.challenge)
    assert vdf_verify(params, p)
    assert oracle_accepts(SMALL_N, 4, 2, p.y, p.pi, p.challenge)


def test_tampered_y_rejected():
    params = vdf_setup(16, 4, SMALL_N)
    p = vdf_eval(params, 2)
    assert not vdf_verify(params, VdfProof(p.x, p.y + 1, p.pi, p.challenge))


def test_pi_one_rejected_when_congruence_fails():
    params = vdf_setup(16, 4, SMALL_N)
    p = vdf_eval(params, 2)
    forged = VdfProof(p.x, p.y, 1, p.challenge)
    # the oracle says the congruence with pi=1 only holds if y == x^(2^T mod l)
    assert (p.y == pow(2, 2**4 % p.challenge, SMALL_N)) == oracle_accepts(
        SMALL_N, 4, 2, p.y, 1, p.challenge)
    assert vdf_verify(params, forged) == oracle_accepts(SMALL_N, 4, 2, p.y, 1, p.challenge)


def test_pi_one_with_wrong_y_rejected():
    params = vdf_setup(16, 4, SMALL_N)
    p = vdf_eval(params, 2)
    y_bad = pow(2, 5, SMALL_N)
    assert y_bad != p.y
    assert not vdf_verify(params, VdfProof(2, y_bad, 1, p.challenge))


@pytest.mark.parametrize("x", [0, 1, SMALL_N, SMALL_N + 5])
def test_eval_input_range(x):
    with pytest.raises(InputOutOfRange):
        vdf_eval(vdf_setup(16, 4, SMALL_N), x)


def test_small_factor_screen_only_for_common_factors():
    n = 3 * 1061 + 2  # odd modulus with no factor of 3
    params = vdf_setup(16, 3, 15)
    with pytest.raises(InputOutOfRange):
        vdf_eval(params, 6)   # shares 3 with N=15
    vdf_eval(vdf_setup(16, 3, n), 6)


def test_verify_never_raises():
    params = vdf_setup(16, 4, SMALL_N)
    for junk in (VdfProof(2, 0, 0, 0), VdfProof(-1, 5, 5, 7), VdfProof(2, 5, 5, 4)):
        assert vdf_verify(params, junk) is False
    assert vdf_verify(params, object()) is False


def test_determinism():
    params = vdf_setup(32, 1000, 1000003 * 1000033)
    assert vdf_eval(params, 12345) == vdf_eval(params, 12345)


def test_hash_to_prime_properties():
    p = hash_to_prime(b"abc")
    assert p == hash_to_prime(b"abc")
    assert p.bit_length() == 128 and p % 2 == 1
    assert sympy.isprime(p)
    assert hash_to_prime(b"abc", bits=64).bit_length() == 64
    with pytest.raises(ValueError):
        hash_to_prime(b"")


def test_hash_to_prime_one_bit_flips_distinct():
    rng = random.Random(5)
    for _ in range(1000):
        data = bytearray(rng.randbytes(rng.randint(1, 32)))
        a = hash_to_prime(bytes(data), bits=64)
        i = rng.randrange(len(data) * 8)
        data[i // 8] ^= 1 << (i % 8)
        assert a != hash_to_prime(bytes(data), bits=64)


@given(st.integers(0, 2**16), st.integers(1, 2**12))
@settings(max_examples=40)
def test_round_trip_property(xseed, t):
    n = 1000003 + 1000033 + 1000037
    rng = random.Random(xseed)
    x = rng.randrange(2, n)
    params = vdf_setup(32, t, n)
    try:
        p = vdf_eval(params, x)
    except InputOutOfRange:
        return
    assert vdf_verify(params, p)
    assert (p.y, p.pi) == oracle_eval(n, t, x, p.challenge)


def test_bench_and_fit():
    rows = vdf.bench(1000003 + 1000033 + 1000037, [256, 512], repeats=1)
    assert [r.difficulty for r in rows] == [256, 512]
    assert vdf.linear_r2([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)


def test_params_and_proof_json_round_trip():
    params = vdf_setup(16, 4, SMALL_N)
    p = vdf_eval(params, 2)
    assert vdf.VdfParams.from_dict(params.to_dict()) == params
    assert VdfProof.from_dict(p.to_dict()) == p
