"""Frontrun rate against VDF delay, averaged over a few seeds."""
import argparse

from firstkit.chainsim import SimConfig, run_simulation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--delays", type=int, nargs="+", default=[0, 6, 12, 30, 60, 240])
    args = ap.parse_args()

    print(" t1(s)  frontrun  max victim wait(s)")
    for t1 in args.delays:
        rates, waits = [], []
        for seed in range(args.seeds):
            cfg = SimConfig(seed=seed, horizon_s=900, difficulty_T=t1,
                            vdf_seconds_per_step=1.0, freshness_threshold=200)
            r = run_simulation(cfg)
            rates.append(r.frontrun_rate)
            waits.append(r.max_victim_wait)
        print(f"{t1:6d}  {sum(rates) / len(rates):8.3f}  {max(waits):10.1f}")

    r = run_simulation(SimConfig(seed=0, adversary_strategy="offline_precompute",
                                 freshness_threshold=5))
    reasons = {a.reason for a in r.adversary_records() if a.block is not None}
    print(f"offline stock, freshness 5 blocks: rate {r.frontrun_rate}, reasons {sorted(reasons)}")


if __name__ == "__main__":
    main()
