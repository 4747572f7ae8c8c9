"""Regenerate aggsig_golden.json using only py_ecc (independent of firstkit).

Run from the repository root: python tests/data/regen_aggsig_golden.py
"""

import hashlib
import json
import os

from py_ecc.bls.hash_to_curve import hash_to_G1
from py_ecc.bls.point_compression import compress_G1, compress_G2
from py_ecc.optimized_bls12_381 import G2, add, multiply

DST = b"FIRST-AGGSIG-v1"
SECRETS = [1, 2, 0x1234567890ABCDEF, 2**200 + 12345]
MESSAGES = [b"", b"abc", b"challenge-0", bytes(range(64))]


def g1_hex(p):
    return compress_G1(p).to_bytes(48, "big").hex()


def g2_hex(p):
    z1, z2 = compress_G2(p)
    return (z1.to_bytes(48, "big") + z2.to_bytes(48, "big")).hex()


def main():
    cases = []
    for sk, msg in zip(SECRETS, MESSAGES):
        h = hash_to_G1(msg, DST, hashlib.sha256)
        cases.append({"secret": f"{sk:064x}", "message": msg.hex(), "public_key": g2_hex(multiply(G2, sk)),
                      "hash": g1_hex(h), "signature": g1_hex(multiply(h, sk))})
    agg = None
    for sk, msg in zip(SECRETS, MESSAGES):
        s = multiply(hash_to_G1(msg, DST, hashlib.sha256), sk)
        agg = s if agg is None else add(agg, s)
    out = {"dst": DST.decode(), "cases": cases, "aggregate": g1_hex(agg)}
    path = os.path.join(os.path.dirname(__file__), "aggsig_golden.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
