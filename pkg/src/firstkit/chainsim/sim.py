"""Deterministic discrete-event simulation of a FIRST-protected dApp on an
EIP-1559 chain under a frontrunning adversary.

Time is continuous; blocks are mined every ``block_interval_s``. A victim
requests its challenge at ``t_r`` and enters the pool at ``t_r + t1`` where
``t1 = difficulty_T * vdf_seconds_per_step``. The adversary reacts to what it
sees in the pool. By default the contract is modelled by its freshness check
only; with ``real_vdf`` every FIRST transaction runs the full protocol and
the full contract validation.
"""

from __future__ import annotations

import csv
import dataclasses
import heapq
import io
import json
import math
import random
from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import ConfigInvalid
from .adversary import STRATEGIES, adversary_step
from .chain import Chain
from .contract import STALE
from .fees import base_fee_update
from .miner import MempoolEntry, mine_block

SCHEMA = "simconfig/1"
TIP_KINDS = ("constant", "uniform", "lognormal", "choice")

# at equal timestamps, submissions land before the block is mined
_SUBMIT, _BLOCK = 0, 1


@dataclass
class SimConfig:
    seed: int = 0
    horizon_s: float = 1800.0
    block_interval_s: float = 12.0
    block_gas_target: int = 15_000_000
    block_gas_limit: int = 30_000_000
    block_qty: Optional[int] = None
    base_fee_init: int = 10_000_000_000
    tx_gas: int = 100_000
    tx_arrival_rate: float = 14.0
    tip_distribution: dict = field(default_factory=lambda: {"kind": "lognormal", "mu": 1.5,
                                                            "sigma": 1.0})
    fee_cap_distribution: Optional[dict] = field(
        default_factory=lambda: {"kind": "uniform", "low": 1.0, "high": 2.0})
    victim_arrival_rate: float = 0.05
    victim_tip_distribution: Optional[dict] = None
    victim_start_s: float = 120.0
    difficulty_T: int = 30
    vdf_seconds_per_step: float = 1.0
    freshness_threshold: int = 20
    adversary_strategy: str = "reactive"
    adversary_tip_markup: float = 1.1
    adversary_latency_s: float = 0.0
    real_vdf: bool = False
    verifier_count: int = 3
    security_k: int = 16
    offline_stock: int = 8

    @property
    def t1_seconds(self) -> float:
        return self.difficulty_T * self.vdf_seconds_per_step

    def validate(self) -> "SimConfig":
        positive = ("horizon_s", "block_interval_s", "block_gas_target", "block_gas_limit",
                    "base_fee_init", "tx_gas", "tx_arrival_rate", "victim_arrival_rate")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigInvalid(f"{name} must be positive")
        if self.block_qty is not None and self.block_qty <= 0:
            raise ConfigInvalid("block_qty must be positive")
        if self.vdf_seconds_per_step < 0:
            raise ConfigInvalid("vdf_seconds_per_step must be non-negative")
        if self.difficulty_T < 0 or self.freshness_threshold < 0 or self.victim_start_s < 0:
            raise ConfigInvalid("difficulty_T, freshness_threshold and victim_start_s must be >= 0")
        if self.adversary_latency_s < 0 or self.adversary_tip_markup < 1:
            raise ConfigInvalid("adversary latency must be >= 0 and tip markup >= 1")
        if self.adversary_strategy not in STRATEGIES:
            raise ConfigInvalid(f"adversary_strategy must be one of {STRATEGIES}")
        if self.tx_gas > self.block_gas_limit:
            raise ConfigInvalid("tx_gas exceeds the block gas limit")
        for dist in (self.tip_distribution, self.victim_tip_distribution,
                     self.fee_cap_distribution):
            if dist is not None:
                _check_dist(dist)
        if self.real_vdf:
            if self.difficulty_T <= 0:
                raise ConfigInvalid("real_vdf needs difficulty_T > 0")
            if self.verifier_count < 3 or self.verifier_count % 2 == 0:
                raise ConfigInvalid("verifier_count must be odd and >= 3")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["schema"] = SCHEMA
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        schema = d.pop("schema", SCHEMA)
        if schema != SCHEMA:
            raise ConfigInvalid(f"unsupported config schema {schema!r}")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**d).validate()
        except TypeError as e:
            raise ConfigInvalid(str(e)) from None

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigInvalid(f"config is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
        return cls.from_dict(data)


def _check_dist(d: dict) -> None:
    kind = d.get("kind") if isinstance(d, dict) else None
    need = {"constant": ("value",), "uniform": ("low", "high"), "lognormal": ("mu", "sigma"),
            "choice": ("values",)}
    if kind not in need:
        raise ConfigInvalid(f"tip distribution kind must be one of {TIP_KINDS}")
    for k in need[kind]:
        if k not in d:
            raise ConfigInvalid(f"{kind} tip distribution needs {k!r}")
    if kind == "uniform" and not 0 <= d["low"] <= d["high"]:
        raise ConfigInvalid("uniform tip distribution needs 0 <= low <= high")
    if kind == "constant" and d["value"] < 0:
        raise ConfigInvalid("tip percent must be non-negative")
    if kind == "choice" and (not d["values"] or min(d["values"]) < 0):
        raise ConfigInvalid("choice tip distribution needs non-negative values")


def sample_tip_pct(dist: dict, rng: random.Random) -> float:
    kind = dist["kind"]
    if kind == "constant":
        return float(dist["value"])
    if kind == "uniform":
        return rng.uniform(dist["low"], dist["high"])
    if kind == "lognormal":
        return rng.lognormvariate(dist["mu"], dist["sigma"])
    return float(rng.choice(dist["values"]))


@dataclass
class SimTxRecord:
    tx_id: str
    kind: str
    target: str
    tip: int
    submit_s: float
    block_curr: Optional[int] = None
    status: str = "pending"
    reason: str = ""
    confirm_s: Optional[float] = None
    block: Optional[int] = None
    index: Optional[int] = None
    frontrun: bool = False

    @property
    def waited_s(self) -> Optional[float]:
        return None if self.confirm_s is None else self.confirm_s - self.submit_s


@dataclass
class BlockStat:
    number: int
    time_s: float
    base_fee: int
    gas_used: int
    tx_count: int


CSV_COLUMNS = ("tx_id", "kind", "target", "tip", "submit_s", "block_curr", "status", "reason",
               "confirm_s", "block", "index", "waited_s", "frontrun")


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _round(obj):
    if isinstance(obj, float):
        return round(obj, 6)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round(v) for v in obj]
    return obj


@dataclass
class SimReport:
    config: SimConfig
    records: list[SimTxRecord]
    blocks: list[BlockStat]

    def victims(self) -> list[SimTxRecord]:
        return [r for r in self.records if r.kind == "victim"]

    @property
    def frontrun_count(self) -> int:
        return sum(r.frontrun for r in self.victims())

    @property
    def frontrun_rate(self) -> float:
        v = self.victims()
        return self.frontrun_count / len(v) if v else 0.0

    def victim_wait(self, r: SimTxRecord) -> float:
        """Observed wait; still-pending victims count up to the horizon."""
        return r.waited_s if r.waited_s is not None else self.config.horizon_s - r.submit_s

    @property
    def max_victim_wait(self) -> float:
        return max((self.victim_wait(r) for r in self.victims()), default=0.0)

    def adversary_records(self) -> list[SimTxRecord]:
        return [r for r in self.records if r.kind == "adversary"]

    def summary(self) -> dict:
        adv = self.adversary_records()
        reasons: dict[str, int] = {}
        for r in adv:
            if r.status == "rejected":
                reasons[r.reason] = reasons.get(r.reason, 0) + 1
        status: dict[str, int] = {}
        for r in self.records:
            status[r.status] = status.get(r.status, 0) + 1
        victims = self.victims()
        return _round({
            "schema": "simreport/1",
            "seed": self.config.seed,
            "t1_seconds": self.config.t1_seconds,
            "adversary_strategy": self.config.adversary_strategy,
            "victims": len(victims),
            "victims_executed": sum(r.status == "executed" for r in victims),
            "frontrun_count": self.frontrun_count,
            "frontrun_rate": self.frontrun_rate,
            "max_victim_wait_s": self.max_victim_wait,
            "adversary_planned": len(adv),
            "adversary_executed": sum(r.status == "executed" for r in adv),
            "adversary_abandoned": sum(r.status == "abandoned" for r in adv),
            "adversary_reject_reasons": dict(sorted(reasons.items())),
            "tx_status_counts": dict(sorted(status.items())),
            "blocks": len(self.blocks),
            "final_base_fee": self.blocks[-1].base_fee if self.blocks else self.config.base_fee_init,
            "mean_gas_used": (sum(b.gas_used for b in self.blocks) / len(self.blocks)
                              if self.blocks else 0.0),
        })

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()


class _RealPipeline:
    """Runs the actual protocol for FIRST transactions (small T only)."""

    def __init__(self, cfg: SimConfig, chain: Chain):
        from ..protocol import Federation, user_prepare_intent
        self._intent = user_prepare_intent
        self.fed = Federation(cfg.verifier_count, cfg.security_k, cfg.difficulty_T,
                              seed=cfg.seed, chain=chain, threshold=cfg.freshness_threshold)
        self.contract_addr = self.fed.contract.address
        self.stock: list = []

    def request(self, who: str, fname: str):
        intent = self._intent(who, fname, self.contract_addr, self.fed.user(who))
        record, cb = self.fed.request_challenge(intent)
        return (intent, record, cb)

    def finish(self, session, tip_pct: float):
        from ..protocol import user_build_tx, user_eval_and_submit_proof
        intent, record, cb = session
        f = self.fed
        proof = user_eval_and_submit_proof(intent, record, cb, f.pp, f.pp_sigs, f.verifier_set)
        if proof is None:
            return None
        ab = f.submit_proof(intent, record, proof)
        return user_build_tx(intent, record, cb, ab, f.verifier_set, tip_pct)

    def validate(self, tx, height: int):
        return self.fed.contract.execute(tx, height)


def run_simulation(config: SimConfig) -> SimReport:
    cfg = config.validate()
    bg_rng = random.Random(f"{cfg.seed}:background")
    victim_rng = random.Random(f"{cfg.seed}:victims")
    chain = Chain()
    real = _RealPipeline(cfg, chain) if cfg.real_vdf else None
    t1 = cfg.t1_seconds
    victim_dist = cfg.victim_tip_distribution or cfg.tip_distribution

    events: list = []
    seq = 0

    def push(t: float, order: int, kind: str, data=None):
        nonlocal seq
        heapq.heappush(events, (t, order, seq, kind, data))
        seq += 1

    records: dict[str, SimTxRecord] = {}
    entries: dict[str, MempoolEntry] = {}
    sessions: dict[str, Any] = {}
    txs: dict[str, Any] = {}
    blocks: list[BlockStat] = []
    base_fee = cfg.base_fee_init
    counters = {"bg": 0, "victim": 0, "adv": 0}

    def next_id(prefix: str) -> str:
        counters[prefix] += 1
        return f"{prefix}-{counters[prefix]:06d}"

    def cap_multiplier(r: random.Random) -> Optional[float]:
        d = cfg.fee_cap_distribution
        return None if d is None else sample_tip_pct(d, r)

    def tip_wei(pct: float) -> int:
        return max(0, int(pct * base_fee / 100))

    def enter_pool(rec: SimTxRecord, now: float, tx=None, cap_mult: Optional[float] = None):
        rec.submit_s = now
        # willingness to pay is stationary: anchored to the initial base fee
        cap = None if cap_mult is None else int(cfg.base_fee_init * cap_mult) + rec.tip
        e = MempoolEntry(rec.tx_id, rec.tip, now, cfg.tx_gas,
                         kind="plain" if rec.kind == "background" else "first", tx=tx,
                         max_fee=cap)
        entries[rec.tx_id] = e
        chain.submit(e)

    # victims are drawn up front on their own stream: every difficulty sees the
    # same victims entering the pool at the same instants
    t = cfg.victim_start_s
    while True:
        t += victim_rng.expovariate(cfg.victim_arrival_rate)
        if t >= cfg.horizon_s:
            break
        vid = next_id("victim")
        pct = sample_tip_pct(victim_dist, victim_rng)
        mult = cap_multiplier(victim_rng)
        records[vid] = SimTxRecord(vid, "victim", "", 0, t)
        push(max(0.0, t - t1), _SUBMIT, "victim_request", vid)
        push(t, _SUBMIT, "victim_submit", (vid, pct, mult))
    push(bg_rng.expovariate(cfg.tx_arrival_rate), _SUBMIT, "bg")
    push(cfg.block_interval_s, _BLOCK, "block")
    if real is not None and cfg.adversary_strategy == "offline_precompute":
        for k in range(cfg.offline_stock):
            real.stock.append(real.request("0xmallory", f"precomputed-{k}"))

    while events:
        now, _, _, kind, data = heapq.heappop(events)
        if kind == "bg":
            rec = SimTxRecord(next_id("bg"), "background", "",
                              tip_wei(sample_tip_pct(cfg.tip_distribution, bg_rng)), now)
            records[rec.tx_id] = rec
            enter_pool(rec, now, cap_mult=cap_multiplier(bg_rng))
            nxt = now + bg_rng.expovariate(cfg.tx_arrival_rate)
            if nxt < cfg.horizon_s:
                push(nxt, _SUBMIT, "bg")
        elif kind == "victim_request":
            vid = data
            records[vid].block_curr = chain.height
            if real is not None:
                sessions[vid] = real.request(f"0x{vid}", "swap")
        elif kind == "victim_submit":
            vid, pct, mult = data
            rec = records[vid]
            rec.tip = tip_wei(pct)
            tx = None
            if real is not None:
                tx = real.finish(sessions.pop(vid), pct)
                txs[vid] = tx
            enter_pool(rec, now, tx, mult)
            plan = adversary_step(cfg.adversary_strategy, vid, rec.tip, now, t1,
                                  cfg.adversary_tip_markup, cfg.adversary_latency_s,
                                  stock_ready_at=t1)
            if plan is not None:
                push(plan.request_at, _SUBMIT, "adv_request", plan)
        elif kind == "adv_request":
            plan = data
            aid = next_id("adv")
            block_curr = chain.height if plan.block_curr is None else plan.block_curr
            rec = SimTxRecord(aid, "adversary", plan.target, plan.tip, plan.at, block_curr)
            records[aid] = rec
            if real is not None:
                if plan.block_curr is None:
                    sessions[aid] = real.request("0xmallory", "frontrun")
                elif real.stock:
                    sessions[aid] = real.stock.pop(0)
                else:
                    rec.status, rec.reason = "abandoned", "NoStock"
                    continue
            push(plan.at, _SUBMIT, "adv_submit", aid)
        elif kind == "adv_submit":
            rec = records[data]
            victim = records.get(rec.target)
            if now >= cfg.horizon_s or victim is None or victim.status != "pending":
                # a rational attacker does not pay for a race it already lost
                rec.status = "abandoned"
                rec.reason = "Horizon" if now >= cfg.horizon_s else "VictimConfirmed"
                sessions.pop(rec.tx_id, None)
                continue
            tx = None
            if real is not None:
                tx = real.finish(sessions.pop(rec.tx_id), 0.0)
                if tx is None:
                    rec.status, rec.reason = "abandoned", "PipelineBottom"
                    continue
                txs[rec.tx_id] = tx
            enter_pool(rec, now, tx)
        elif kind == "block":
            height = chain.advance()
            block, rest = mine_block(chain.pool, cfg.block_gas_limit, cfg.block_qty, base_fee)
            chain.pool = rest
            for idx, e in enumerate(block):
                rec = records[e.tx_id]
                rec.confirm_s, rec.block, rec.index = now, height, idx
                if rec.kind == "background":
                    rec.status = "confirmed"
                    continue
                if real is not None:
                    verdict = real.validate(txs[rec.tx_id], height)
                    ok, reason = verdict.executed, verdict.reason or ""
                else:
                    ok = rec.block_curr <= height and height - rec.block_curr <= cfg.freshness_threshold
                    reason = "" if ok else STALE
                rec.status = "executed" if ok else "rejected"
                rec.reason = reason
            gas_used = sum(e.gas for e in block)
            blocks.append(BlockStat(height, now, base_fee, gas_used, len(block)))
            base_fee = base_fee_update(base_fee, gas_used, cfg.block_gas_target)
            nxt = now + cfg.block_interval_s
            if nxt <= cfg.horizon_s + 1e-9:
                push(nxt, _BLOCK, "block")

    out = sorted(records.values(), key=lambda r: (r.submit_s, r.tx_id))
    _mark_frontruns(out)
    if real is not None:
        real.fed.close()
    return SimReport(cfg, out, blocks)


def _mark_frontruns(records: list[SimTxRecord]) -> None:
    victims = {r.tx_id: r for r in records if r.kind == "victim"}
    inf = (math.inf, math.inf)
    for a in records:
        if a.kind != "adversary" or a.status != "executed":
            continue
        v = victims.get(a.target)
        if v is None:
            continue
        v_pos = (v.block, v.index) if v.block is not None else inf
        if (a.block, a.index) < v_pos:
            v.frontrun = True
