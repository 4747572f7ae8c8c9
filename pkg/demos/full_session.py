"""One user transaction through a five-verifier federation with two faulty members.

Writes the message transcript to ``session.jsonl`` in the working directory.
"""
import argparse

from firstkit.chainsim import contract_validate
from firstkit.protocol import Federation, user_prepare_intent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--difficulty", type=int, default=4096)
    ap.add_argument("--transcript", default="session.jsonl")
    args = ap.parse_args()

    fed = Federation(5, security_k=32, difficulty_T=args.difficulty, seed=1)
    print(f"pp: N has {fed.pp.modulus.bit_length()} bits, T = {args.difficulty}")
    print(f"contract at {fed.contract.address}")

    fed.corrupt({1: "garbage", 4: "drop"})
    intent = user_prepare_intent("0xalice", "swap", fed.contract.address, fed.user("alice"))
    result = fed.run(intent, declared_tip_pct=20.0)
    tx = result.tx
    print(f"attempts: {[a.outcome for a in result.attempts]}")
    print(f"challenge bundle signers: {len(tx.challenge_bundle)}/5, "
          f"accept bundle signers: {len(tx.accept_bundle)}/5")

    fed.chain.advance(2)
    verdict = contract_validate(tx, fed.chain.height, fed.epoch.freshness_threshold,
                                fed.verifier_set)
    print(f"contract at block {fed.chain.height}: executed={verdict.executed}")
    late = contract_validate(tx, tx.block_curr + fed.epoch.freshness_threshold + 1,
                             fed.epoch.freshness_threshold, fed.verifier_set)
    print(f"same tx past the freshness window: {late.reason}")

    with open(args.transcript, "w") as fh:
        fed.transcript.write(fh)
    print(f"{len(fed.transcript.entries)} messages logged to {args.transcript}")
    fed.close()


if __name__ == "__main__":
    main()
