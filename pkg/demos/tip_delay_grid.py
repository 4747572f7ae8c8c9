"""Probability grid over (tip %, VDF delay) on a synthetic trace, then a recommendation.

Pass ``--trace FILE`` to use a real trace CSV instead.
"""
import argparse
import random
from fractions import Fraction

from firstkit.analytics import TraceRecord, grid_report, ingest_trace, recommend_epoch


def synthetic(n, seed):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        base = 30 * 10**9
        tip = int(base * rng.lognormvariate(-2.0, 0.8))
        wait = Fraction(round(rng.expovariate(1 / 40), 1)).limit_denominator(10)
        out.append(TraceRecord(13_000_000 + i // 200, f"0x{i:06x}", base, tip, base + tip, wait))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trace")
    ap.add_argument("--target", type=Fraction, default=Fraction(1, 100))
    args = ap.parse_args()

    records = ingest_trace(args.trace) if args.trace else synthetic(20_000, 0)
    tips, delays = [0, 5, 10, 15, 20, 25], [12, 30, 60, 120]
    g = grid_report(records, tips, delays)
    print("tip% " + "".join(f"{d:>9}s" for d in delays))
    for tip in tips:
        print(f"{tip:4d} " + "".join(f"{float(g.cell(tip, d)):10.4f}" for d in delays))
    rec = recommend_epoch(records, args.target, delays)
    print(f"target {float(args.target):.4f}: tip {float(rec.tip_pct):.0f}%, "
          f"t1 {float(rec.vdf_delay_s):.0f}s, p = {float(rec.probability):.4f}")


if __name__ == "__main__":
    main()
