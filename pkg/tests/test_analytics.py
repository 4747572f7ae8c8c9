import os
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from firstkit.analytics import (
    TRACE_COLUMNS, TraceRecord, frontrun_fraction, frontrun_probability, grid_report,
    ingest_trace, parse_trace, recommend_epoch,
)
from firstkit.errors import EmptyTrace, Infeasible, MalformedRow, SchemaMismatch

HEADER = ",".join(TRACE_COLUMNS) + "\n"


def brute(records, tip, delay):
    # independent enumeration straight from the definition
    n = 0
    for r in records:
        if Fraction(100 * r.miner_tip, r.base_fee) >= tip and r.wait_seconds >= delay:
            n += 1
    return Fraction(n, len(records))


def rec(tip_pct, wait, i=0, base=1000):
    return TraceRecord(i, f"t{i}", base, int(tip_pct * base / 100), base, Fraction(wait))


@pytest.fixture
def trace5(data_dir):
    return ingest_trace(os.path.join(data_dir, "trace5.csv"))


def test_fixture(trace5):
    assert len(trace5) == 5
    assert [r.tip_pct for r in trace5] == [5, 10, 25, 30, 25]
    assert [r.wait_seconds for r in trace5] == [600, 100, 2500, 300, 50]
    assert frontrun_fraction(trace5, 20, 500) == Fraction(1, 5) == brute(trace5, 20, 500)
    assert frontrun_probability(trace5, 20, 500) == 0.2
    assert frontrun_probability(trace5, 0, 0) == 1.0


def test_zero_base_fee_skipped_or_strict():
    text = HEADER + "1,a,0,1,1,5\n2,b,10,1,11,5\n"
    t = parse_trace(text)
    assert len(t) == 1 and len(t.skipped) == 1 and t.skipped[0].line == 2
    with pytest.raises(MalformedRow) as e:
        parse_trace(text, strict=True)
    assert e.value.line == 2


def test_malformed_rows_reported():
    text = HEADER + "1,a,10,1,11,x\n2,b,10,1,11,-3\n3,c,10,1\n4,d,10,1,11,7.5\n"
    t = parse_trace(text)
    assert len(t) == 1 and t[0].wait_seconds == Fraction(15, 2)
    assert [m.line for m in t.skipped] == [2, 3, 4]


def test_header_checks():
    with pytest.raises(SchemaMismatch):
        parse_trace("block_number,tx_id,base_fee_wei,miner_tip_wei,gas_price_wei\n1,a,1,1,1\n")
    with pytest.raises(SchemaMismatch):
        parse_trace("")
    with pytest.raises(EmptyTrace):
        parse_trace(HEADER)
    with pytest.raises(EmptyTrace):
        frontrun_fraction([], 0, 0)


def test_grid_matches_single_calls(trace5):
    g = grid_report(trace5, [20], [500])
    assert g.cell(20, 500) == frontrun_fraction(trace5, 20, 500)
    assert g.counts.shape == (1, 1)


def test_grid_csv_format(trace5):
    lines = grid_report(trace5, [0, 20], [0, 500]).to_csv().splitlines()
    assert lines[0] == "tip_pct,vdf_delay_s,count,total,probability"
    assert "20.000000,500.000000,1,5,0.200000" in lines


def test_recommend(trace5):
    r = recommend_epoch(trace5, 1.0, [100, 500])
    assert (r.tip_pct, r.vdf_delay_s) == (0, 100)
    r = recommend_epoch(trace5, Fraction(1, 5), [100, 500], tip_grid=range(0, 31, 5))
    # delay 100 first: tips 0..25 give >= 2/5; tip 30 gives 0
    assert (r.tip_pct, r.vdf_delay_s) == (30, 100)


def test_recommend_infeasible():
    records = [rec(30, 10_000)]
    with pytest.raises(Infeasible):
        recommend_epoch(records, 0, [100, 500], tip_grid=[0, 10, 20, 30])


traces = st.lists(st.tuples(st.integers(0, 40), st.integers(0, 3000)), min_size=1, max_size=100)


@given(traces, st.lists(st.integers(0, 40), min_size=1, max_size=6),
       st.lists(st.integers(0, 3000), min_size=1, max_size=6))
def test_grid_equals_brute_force(items, tips, delays):
    records = [rec(t, w, i) for i, (t, w) in enumerate(items)]
    g = grid_report(records, tips, delays)
    for tip, delay, count, total, p in g.rows():
        assert p == brute(records, tip, delay)
    probs = g.probabilities
    assert ((0 <= probs) & (probs <= 1)).all()
    assert (np.diff(g.counts, axis=0) <= 0).all() and (np.diff(g.counts, axis=1) <= 0).all()


@given(traces)
def test_monotone_and_bounds(items):
    records = [rec(t, w, i) for i, (t, w) in enumerate(items)]
    assert frontrun_fraction(records, 0, 0) == 1
    rng = random.Random(len(items))
    for _ in range(5):
        a, b = sorted(rng.sample(range(0, 50), 2))
        c, d = sorted(rng.sample(range(0, 3100), 2))
        assert frontrun_fraction(records, b, c) <= frontrun_fraction(records, a, c)
        assert frontrun_fraction(records, a, d) <= frontrun_fraction(records, a, c)


# -- the original 37672-transaction trace, only if supplied ---------------------

MAINNET_TRACE = os.environ.get("FIRST_MAINNET_TRACE") or os.path.join(
    os.path.dirname(__file__), "data", "mainnet_trace.csv")
needs_trace = pytest.mark.skipif(not os.path.exists(MAINNET_TRACE),
                                 reason="historical trace not supplied")


@pytest.fixture(scope="module")
def mainnet_trace():
    return ingest_trace(MAINNET_TRACE)


@needs_trace
def test_historical_block_range(mainnet_trace):
    blocks = [r.block_number for r in mainnet_trace]
    assert min(blocks) >= 13163075 and max(blocks) <= 13163571
    assert len(mainnet_trace) == 37672


@needs_trace
def test_historical_headline_numbers(mainnet_trace):
    g = grid_report(mainnet_trace, [10, 20], [100, 500, 2000])
    assert g.cell(20, 2000) == Fraction(205, 37672)
    assert round(float(g.cell(20, 2000)), 4) == 0.0054
    assert round(float(g.cell(10, 2000)), 4) == 0.0057
    assert 0.18 <= g.cell(20, 100) <= 0.20
    assert 0.015 <= g.cell(20, 500) <= 0.021


@needs_trace
def test_historical_flatline(mainnet_trace):
    g = grid_report(mainnet_trace, [10, 20, 25], [2000])
    early = g.cell(10, 2000) - g.cell(20, 2000)
    late = g.cell(20, 2000) - g.cell(25, 2000)
    assert late < early / 10


@needs_trace
def test_historical_recommendation(mainnet_trace):
    r = recommend_epoch(mainnet_trace, Fraction(55, 10000), [2000], tip_grid=[10, 20])
    assert r.tip_pct == 20
