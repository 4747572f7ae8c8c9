"""Aggregate signatures over distinct messages, and why duplicates are refused."""
from firstkit import aggsig


def main():
    keys = [aggsig.keygen(f"demo:{i}") for i in range(5)]
    msgs = [f"endorse challenge from V{i}".encode() for i in range(5)]
    sigs = [aggsig.sign(k, m) for k, m in zip(keys, msgs)]

    bundle = aggsig.aggregate(msgs, sigs).with_keys([k.public for k in keys])
    print(f"5 signatures -> one {len(bundle.agg_sigma)}-byte aggregate")
    print(f"aggregate verifies: {aggsig.aggregate_verify(bundle)}")

    # drop a signer but keep their message: the equation no longer balances
    partial = aggsig.aggregate(msgs[:4], sigs[:4]).with_keys([k.public for k in keys])
    print(f"claiming a fifth signer that never signed: {aggsig.aggregate_verify(partial)}")

    dup = [msgs[0], msgs[0]]
    b = aggsig.aggregate(dup, [aggsig.sign(keys[0], dup[0]), aggsig.sign(keys[1], dup[0])])
    print(f"two signers on one message: {aggsig.aggregate_verify(b.with_keys([keys[0].public, keys[1].public]))}")


if __name__ == "__main__":
    main()
