"""Evaluate a Wesolowski VDF over a federated modulus, verify it, then tamper.

    python demos/vdf_roundtrip.py --difficulty 100000
"""
import argparse
import random
import time

from firstkit.protocol.state import random_prime
from firstkit.vdf import VdfProof, vdf_eval, vdf_setup, vdf_verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--difficulty", type=int, default=100_000)
    ap.add_argument("--share-bits", type=int, default=126)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    shares = [random_prime(args.share_bits, rng) for _ in range(3)]
    n = sum(shares)
    print(f"three verifier shares -> N with {n.bit_length()} bits")

    params = vdf_setup(64, args.difficulty, n)
    t0 = time.perf_counter()
    proof = vdf_eval(params, 5)
    t1 = time.perf_counter()
    ok = vdf_verify(params, proof)
    t2 = time.perf_counter()
    print(f"eval  {t1 - t0:8.4f}s  ({args.difficulty} squarings)")
    print(f"verify {t2 - t1:7.4f}s  -> {ok}")

    forged = VdfProof(proof.x, proof.y, proof.pi + 1, proof.challenge)
    print(f"pi + 1 verifies: {vdf_verify(params, forged)}")


if __name__ == "__main__":
    main()
