"""Frontrun probability over (tip, delay) grids from historical traces.

A transaction counts as frontrunnable at (tip_e, V_e) when it paid at least
tip_e percent of its block's base fee as miner tip *and* still waited at least
V_e seconds in the pool; the probability is that count over all records. All
counting is exact (:class:`fractions.Fraction`); floats appear only at output.

Trace CSV header (exact)::

    block_number,tx_id,base_fee_wei,miner_tip_wei,gas_price_wei,wait_seconds

``wait_seconds`` is first-seen to confirmed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyTrace, Infeasible, MalformedRow, SchemaMismatch

TRACE_COLUMNS = ("block_number", "tx_id", "base_fee_wei", "miner_tip_wei", "gas_price_wei",
                 "wait_seconds")
GRID_COLUMNS = ("tip_pct", "vdf_delay_s", "count", "total", "probability")


def _num(text: str) -> Fraction:
    # Fraction parses "12", "12.5" and "1e3" exactly
    return Fraction(text.strip())


@dataclass(frozen=True)
class TraceRecord:
    block_number: int
    tx_id: str
    base_fee: int
    miner_tip: int
    gas_price: int
    wait_seconds: Fraction

    def __post_init__(self):
        if self.base_fee <= 0:
            raise ValueError("base_fee must be positive")
        if self.miner_tip < 0 or self.gas_price < 0:
            raise ValueError("fees must be non-negative")
        if self.wait_seconds < 0:
            raise ValueError("wait_seconds must be non-negative")

    @property
    def tip_pct(self) -> Fraction:
        return Fraction(100 * self.miner_tip, self.base_fee)


class Trace(list):
    """A list of :class:`TraceRecord` that remembers rows skipped on ingest."""

    def __init__(self, records=(), skipped: Optional[list[MalformedRow]] = None):
        super().__init__(records)
        self.skipped: list[MalformedRow] = skipped or []


def _parse_row(line: int, row: dict) -> TraceRecord:
    try:
        wei = {k: int(row[k].strip()) for k in ("block_number", "base_fee_wei", "miner_tip_wei",
                                               "gas_price_wei")}
        wait = _num(row["wait_seconds"])
    except (ValueError, ZeroDivisionError, AttributeError) as e:
        raise MalformedRow(line, f"unparseable number ({e})") from None
    try:
        return TraceRecord(wei["block_number"], row["tx_id"].strip(), wei["base_fee_wei"],
                           wei["miner_tip_wei"], wei["gas_price_wei"], wait)
    except ValueError as e:
        raise MalformedRow(line, str(e)) from None


def parse_trace(text: str, strict: bool = False) -> Trace:
    reader = csv.DictReader(io.StringIO(text))
    header = tuple(h.strip() for h in (reader.fieldnames or ()))
    if header != TRACE_COLUMNS:
        missing = [c for c in TRACE_COLUMNS if c not in header]
        raise SchemaMismatch("trace header must be " + ",".join(TRACE_COLUMNS)
                             + (f"; missing {','.join(missing)}" if missing else ""))
    reader.fieldnames = list(header)
    records, skipped = [], []
    for row in reader:
        line = reader.line_num
        try:
            if None in row or any(v is None for v in row.values()):
                raise MalformedRow(line, "wrong number of fields")
            records.append(_parse_row(line, row))
        except MalformedRow as e:
            if strict:
                raise
            skipped.append(e)
    if not records:
        raise EmptyTrace("trace has no valid records")
    return Trace(records, skipped)


def ingest_trace(path, strict: bool = False) -> Trace:
    """Read a trace CSV; bad rows abort in strict mode and are skipped otherwise."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_trace(fh.read(), strict=strict)


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v)) if isinstance(v, float) else Fraction(v)


def frontrun_fraction(records: Sequence[TraceRecord], tip_threshold_pct, vdf_delay_s) -> Fraction:
    if not records:
        raise EmptyTrace("no records")
    tip = _as_fraction(tip_threshold_pct)
    delay = _as_fraction(vdf_delay_s)
    hits = sum(1 for r in records if r.tip_pct >= tip and r.wait_seconds >= delay)
    return Fraction(hits, len(records))


def frontrun_probability(records: Sequence[TraceRecord], tip_threshold_pct, vdf_delay_s) -> float:
    return float(frontrun_fraction(records, tip_threshold_pct, vdf_delay_s))


@dataclass
class GridReport:
    tip_axis: list[Fraction]
    delay_axis: list[Fraction]
    counts: np.ndarray          # int64, shape (len(tip_axis), len(delay_axis))
    total: int
    meta: dict = field(default_factory=dict)

    def fraction(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.counts[i, j]), self.total)

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.total

    def cell(self, tip_pct, delay_s) -> Fraction:
        return self.fraction(self.tip_axis.index(_as_fraction(tip_pct)),
                             self.delay_axis.index(_as_fraction(delay_s)))

    def rows(self):
        for i, tip in enumerate(self.tip_axis):
            for j, delay in enumerate(self.delay_axis):
                yield tip, delay, int(self.counts[i, j]), self.total, self.fraction(i, j)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(GRID_COLUMNS)
        for tip, delay, count, total, p in self.rows():
            w.writerow([f"{float(tip):.6f}", f"{float(delay):.6f}", count, total,
                        f"{float(p):.6f}"])
        return buf.getvalue()


def grid_report(records: Sequence[TraceRecord], tip_grid: Iterable, delay_grid: Iterable,
                meta: Optional[dict] = None) -> GridReport:
    """Counts for every (tip, delay) cell in one pass over the records.

    Each record lands in the histogram bin of the largest grid tip and delay
    it clears; a reverse cumulative sum over both axes then gives, per cell,
    the number of records clearing both thresholds.
    """
    if not records:
        raise EmptyTrace("no records")
    tips = sorted({_as_fraction(t) for t in tip_grid})
    delays = sorted({_as_fraction(d) for d in delay_grid})
    if not tips or not delays:
        raise ValueError("tip and delay grids must be non-empty")
    hist = np.zeros((len(tips) + 1, len(delays) + 1), dtype=np.int64)
    for r in records:
        # index k means the record clears grid points 0..k-1
        ti = _count_le(tips, r.tip_pct)
        di = _count_le(delays, r.wait_seconds)
        hist[ti, di] += 1
    cum = hist[::-1, ::-1].cumsum(axis=0).cumsum(axis=1)[::-1, ::-1]
    counts = cum[1:, 1:]
    return GridReport(tips, delays, counts.copy(), len(records), dict(meta or {}))


def _count_le(axis: list[Fraction], value: Fraction) -> int:
    lo, hi = 0, len(axis)
    while lo < hi:
        mid = (lo + hi) // 2
        if axis[mid] <= value:
            lo = mid + 1
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class EpochRecommendation:
    tip_pct: Fraction
    vdf_delay_s: Fraction
    probability: Fraction

    def to_dict(self) -> dict:
        return {"recommended_tip_pct": float(self.tip_pct), "t1_seconds": float(self.vdf_delay_s),
                "probability": float(self.probability),
                "probability_exact": f"{self.probability.numerator}/{self.probability.denominator}"}


def recommend_epoch(records: Sequence[TraceRecord], target_probability, delay_candidates: Iterable,
                    tip_grid: Iterable = tuple(range(0, 26))) -> EpochRecommendation:
    """Smallest (delay, tip) grid pair, delay first, whose probability <= target."""
    target = _as_fraction(target_probability)
    grid = grid_report(records, tip_grid, delay_candidates)
    for j, delay in enumerate(grid.delay_axis):
        for i, tip in enumerate(grid.tip_axis):
            p = grid.fraction(i, j)
            if p <= target:
                return EpochRecommendation(tip, delay, p)
    raise Infeasible(f"no grid point reaches probability <= {float(target):.6f}")
