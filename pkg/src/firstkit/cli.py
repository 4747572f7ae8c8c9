"""Command-line driver.

Exit codes: 0 success, 1 domain error (typed reason on stderr), 2 usage error.
All randomness derives from ``--seed``; without it a seed is drawn once and
written into every artifact so runs can be replayed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import secrets
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import aggsig, analytics, vdf
from .errors import FirstError

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class Rejected(FirstError):
    """A verification returned reject."""


# -- helpers -------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(args, name: str, text: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
    return args.seed


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def parse_grid(text: str) -> list[Fraction]:
    """``"0:25:5"`` (inclusive range) or ``"100,500,2000"``."""
    try:
        if ":" in text:
            start, stop, step = (Fraction(p) for p in text.split(":"))
            if step <= 0:
                raise ValueError
            out, v = [], start
            while v <= stop:
                out.append(v)
                v += step
            return out
        return [Fraction(p) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _seeded_modulus(seed: int, bits: int, parties: int = 3) -> int:
    from .protocol.state import random_prime
    rng = random.Random(f"{seed}:bench-modulus")
    share_bits = max(3, bits - 2)
    return sum(random_prime(share_bits, rng) for _ in range(parties))


# -- subcommands -----------------------------------------------------------------

def cmd_keygen(args) -> int:
    seed = _seed(args)
    kp = aggsig.keygen(f"{seed}:{args.name}")
    doc = {"name": args.name, "seed": seed, "public_key": kp.public.hex(),
           "secret_key": kp.secret_bytes().hex()}
    _write(args, f"{args.name}.key.json", _dump(doc))
    print(kp.public.hex())
    return EXIT_OK


def cmd_setup(args) -> int:
    from .protocol import Federation, Transcript, user_prepare_intent
    seed = _seed(args)
    transcript = Transcript()
    fed = Federation(args.verifiers, args.security_k, args.difficulty, seed=seed,
                     threshold=args.threshold, share_bits=args.share_bits, transcript=transcript)
    try:
        pp_doc = {"seed": seed, "pp": fed.pp.to_dict(),
                  "signatures": {k: s.sigma.hex() for k, s in sorted(fed.pp_sigs.items())},
                  "restarts": fed.restarts, "epoch": fed.epoch.to_dict(),
                  "contract": fed.contract.descriptor()}
        _write(args, "pp.json", _dump(pp_doc))
        _write(args, "verifiers.json", _dump({
            "seed": seed,
            "verifiers": [{"id": v.vid, "public_key": v.public_key.hex()} for v in fed.verifiers],
        }))
        out = {"modulus": str(fed.pp.modulus), "modulus_bits": fed.pp.modulus.bit_length(),
               "difficulty": args.difficulty, "verifiers": args.verifiers}
        if args.session:
            name = args.session
            intent = user_prepare_intent(f"0x{name}", args.function, fed.contract.address,
                                         fed.user(name))
            result = fed.run(intent)
            verdict = fed.execute(result.tx)
            _write(args, "tx.json", _dump(result.tx.to_dict()))
            out["session"] = {"attempts": [a.outcome for a in result.attempts],
                              "challenge": str(result.tx.challenge),
                              "executed": verdict.executed, "reason": verdict.reason}
    finally:
        fed.close()
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            transcript.write(fh)
    sys.stdout.write(_dump(out))
    return EXIT_OK


def _vdf_params(args) -> vdf.VdfParams:
    if args.pp:
        pp = _load_json(args.pp)["pp"]["vdf"]
        modulus, k = int(pp["modulus"]), int(pp["security_k"])
    else:
        modulus, k = args.modulus, args.security_k
    if modulus is None:
        raise argparse.ArgumentTypeError("need --modulus or --pp")
    return vdf.vdf_setup(k, args.difficulty, modulus)


def cmd_vdf_eval(args) -> int:
    params = _vdf_params(args)
    x = args.x
    if x is None:
        rng = random.Random(f"{_seed(args)}:vdf-input")
        x = rng.randrange(2, params.modulus)
        while vdf._shares_small_factor(x, params.modulus):
            x = rng.randrange(2, params.modulus)
    proof = vdf.vdf_eval(params, x)
    _write(args, args.output, _dump({"params": params.to_dict(), "proof": proof.to_dict()}))
    sys.stdout.write(_dump({"y": str(proof.y), "pi": str(proof.pi),
                            "challenge": str(proof.challenge)}))
    return EXIT_OK


def cmd_vdf_verify(args) -> int:
    doc = _load_json(args.proof)
    try:
        params = vdf.VdfParams.from_dict(doc["params"])
        proof = vdf.VdfProof.from_dict(doc["proof"])
    except (KeyError, TypeError, ValueError) as e:
        raise Rejected(f"malformed proof file ({e})") from None
    if not vdf.vdf_verify(params, proof):
        raise Rejected("proof does not verify")
    print("accept")
    return EXIT_OK


def cmd_vdf_bench(args) -> int:
    modulus = args.modulus or _seeded_modulus(_seed(args), args.modulus_bits)
    rows = vdf.bench(modulus, args.difficulties, repeats=args.repeats)
    lines = ["difficulty,eval_s,verify_s"]
    lines += [f"{r.difficulty},{r.eval_s:.6f},{r.verify_s:.6f}" for r in rows]
    text = "\n".join(lines) + "\n"
    _write(args, "bench.csv", text)
    sys.stdout.write(text)
    if len(rows) >= 2:
        r2 = vdf.linear_r2([r.difficulty for r in rows], [r.eval_s for r in rows])
        print(f"# linear fit R^2 = {r2:.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_sim_run(args) -> int:
    from .chainsim.sim import SimConfig, run_simulation
    with open(args.config, encoding="utf-8") as fh:
        cfg = SimConfig.from_json(fh.read())
    if args.seed is not None:
        cfg.seed = args.seed
    if args.real_vdf:
        cfg.real_vdf = True
    report = run_simulation(cfg)
    _write(args, "sim_records.csv", report.to_csv())
    _write(args, "sim_summary.json", report.to_json())
    sys.stdout.write(report.to_json())
    return EXIT_OK


def _trace(args) -> analytics.Trace:
    records = analytics.ingest_trace(args.trace, strict=args.strict)
    for bad in records.skipped:
        print(f"skipped: {bad}", file=sys.stderr)
    return records


def cmd_analyze_grid(args) -> int:
    records = _trace(args)
    grid = analytics.grid_report(records, args.tips, args.delays)
    text = grid.to_csv()
    _write(args, "grid.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze_recommend(args) -> int:
    records = _trace(args)
    rec = analytics.recommend_epoch(records, args.target, args.delays, args.tips)
    doc = {"target_probability": float(args.target), **rec.to_dict(),
           "records": len(records), "skipped": len(records.skipped)}
    _write(args, "recommendation.json", _dump(doc))
    sys.stdout.write(_dump(doc))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _difficulties(text: str) -> list[int]:
    """``14..19`` means powers of two 2^14..2^19; otherwise a comma list."""
    if ".." in text:
        lo, hi = (int(p) for p in text.split(".."))
        return [1 << e for e in range(lo, hi + 1)]
    return [int(p, 0) for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for every random choice")
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="where artifacts go")
    common.add_argument("--transcript", default=argparse.SUPPRESS,
                        help="write the protocol message log (JSON lines) here")

    p = argparse.ArgumentParser(prog="firstkit", parents=[common],
                                description="Frontrunning-resistance toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", parents=[common], help="aggregate-signature key pair")
    k.add_argument("--name", default="user")
    k.set_defaults(func=cmd_keygen)

    s = sub.add_parser("setup", parents=[common], help="verifier federation and public params")
    s.add_argument("--verifiers", type=int, default=3)
    s.add_argument("--difficulty", type=_positive_int, default=1 << 10)
    s.add_argument("--security-k", type=int, default=32)
    s.add_argument("--share-bits", type=int, default=None)
    s.add_argument("--threshold", type=int, default=5, help="freshness threshold in blocks")
    s.add_argument("--session", metavar="USER", help="also run one full transaction session")
    s.add_argument("--function", default="swap", help="function name for --session")
    s.set_defaults(func=cmd_setup)

    v = sub.add_parser("vdf", parents=[common], help="VDF tooling")
    vsub = v.add_subparsers(dest="vdf_command", required=True)
    ve = vsub.add_parser("eval", parents=[common])
    ve.add_argument("--modulus", type=_positive_int)
    ve.add_argument("--pp", help="pp.json from setup")
    ve.add_argument("--security-k", type=int, default=64)
    ve.add_argument("--difficulty", type=_positive_int, required=True)
    ve.add_argument("--x", type=_positive_int)
    ve.add_argument("--output", default="proof.json")
    ve.set_defaults(func=cmd_vdf_eval)
    vv = vsub.add_parser("verify", parents=[common])
    vv.add_argument("proof")
    vv.set_defaults(func=cmd_vdf_verify)
    vb = vsub.add_parser("bench", parents=[common])
    vb.add_argument("--modulus", type=_positive_int)
    vb.add_argument("--modulus-bits", type=int, default=128)
    vb.add_argument("--difficulties", type=_difficulties, default=_difficulties("14..19"))
    vb.add_argument("--repeats", type=int, default=3)
    vb.set_defaults(func=cmd_vdf_bench)

    sm = sub.add_parser("sim", parents=[common], help="chain simulation")
    ssub = sm.add_subparsers(dest="sim_command", required=True)
    sr = ssub.add_parser("run", parents=[common])
    sr.add_argument("config", help="simconfig/1 JSON file")
    sr.add_argument("--real-vdf", action="store_true")
    sr.set_defaults(func=cmd_sim_run)

    a = sub.add_parser("analyze", parents=[common], help="trace analytics")
    asub = a.add_subparsers(dest="analyze_command", required=True)
    for name, fn in (("grid", cmd_analyze_grid), ("recommend", cmd_analyze_recommend)):
        ap = asub.add_parser(name, parents=[common])
        ap.add_argument("trace")
        ap.add_argument("--tips", type=parse_grid, default=parse_grid("0:25:1"))
        ap.add_argument("--delays", type=parse_grid, default=parse_grid("100,500,1000,2000"))
        ap.add_argument("--strict", action="store_true")
        if name == "recommend":
            ap.add_argument("--target", type=_fraction, required=True)
        ap.set_defaults(func=fn)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    for name, default in (("seed", None), ("out_dir", "."), ("transcript", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FirstError as e:
        print(f"error: {e.reason}: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
