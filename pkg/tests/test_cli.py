import csv
import io
import json
import os

import pytest

from firstkit import vdf
from firstkit.chainsim import SimConfig
from firstkit.cli import main, parse_grid


def run(tmp_path, *argv):
    return main(["--out-dir", str(tmp_path), *argv])


def test_keygen_deterministic(tmp_path, capsys):
    assert run(tmp_path / "a", "--seed", "3", "keygen", "--name", "bob") == 0
    assert run(tmp_path / "b", "--seed", "3", "keygen", "--name", "bob") == 0
    a = (tmp_path / "a" / "bob.key.json").read_text()
    assert a == (tmp_path / "b" / "bob.key.json").read_text()


def test_setup_emits_odd_modulus(tmp_path):
    assert run(tmp_path, "--seed", "1", "setup", "--verifiers", "3", "--difficulty", "32") == 0
    pp = json.loads((tmp_path / "pp.json").read_text())
    assert int(pp["pp"]["vdf"]["modulus"]) % 2 == 1


def test_setup_even_verifiers(tmp_path, capsys):
    assert run(tmp_path, "setup", "--verifiers", "4") == 1
    assert "EvenVerifierCount" in capsys.readouterr().err


def test_setup_session_and_transcript(tmp_path, capsys):
    t = tmp_path / "t.jsonl"
    assert run(tmp_path, "--seed", "2", "--transcript", str(t), "setup", "--difficulty", "32",
               "--session", "alice") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["session"]["executed"] is True
    kinds = {json.loads(line)["kind"] for line in t.read_text().splitlines()}
    assert {"share", "challenge", "proof", "accept_bundle"} <= kinds


def test_vdf_round_trip_and_tamper(tmp_path):
    assert run(tmp_path, "vdf", "eval", "--modulus", "3173", "--difficulty", "4", "--x", "2") == 0
    proof = tmp_path / "proof.json"
    assert main(["vdf", "verify", str(proof)]) == 0
    doc = json.loads(proof.read_text())
    assert doc["proof"]["y"] == str(pow(2, 16, 3173))
    doc["proof"]["y"] = str(int(doc["proof"]["y"]) + 1)
    proof.write_text(json.dumps(doc))
    assert main(["vdf", "verify", str(proof)]) == 1


def test_vdf_eval_bad_input(tmp_path, capsys):
    assert run(tmp_path, "vdf", "eval", "--modulus", "16", "--difficulty", "4", "--x", "2") == 1
    assert "EvenModulus" in capsys.readouterr().err


def test_vdf_bench_csv(tmp_path):
    assert run(tmp_path, "--seed", "1", "vdf", "bench", "--difficulties", "8..10",
               "--repeats", "1") == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "bench.csv").read_text())))
    assert [int(r["difficulty"]) for r in rows] == [256, 512, 1024]


def _config(tmp_path, **kw):
    c = SimConfig(horizon_s=400, freshness_threshold=200, **kw)
    p = tmp_path / "sim.json"
    p.write_text(c.to_json())
    return str(p)


def test_sim_none(tmp_path):
    assert run(tmp_path, "sim", "run", _config(tmp_path, adversary_strategy="none")) == 0
    s = json.loads((tmp_path / "sim_summary.json").read_text())
    assert s["frontrun_rate"] == 0


def test_sim_slow_vdf_defeats_reactive(tmp_path):
    assert run(tmp_path, "--seed", "2", "sim", "run",
               _config(tmp_path, difficulty_T=1000, vdf_seconds_per_step=1.0)) == 0
    s = json.loads((tmp_path / "sim_summary.json").read_text())
    assert s["t1_seconds"] > s["max_victim_wait_s"]
    assert s["frontrun_rate"] == 0


def test_sim_bad_config(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"schema": "simconfig/1", "block_interval_s": 0}')
    assert run(tmp_path, "sim", "run", str(p)) == 1
    assert "ConfigInvalid" in capsys.readouterr().err


def test_analyze_fixture(tmp_path, data_dir):
    trace = os.path.join(data_dir, "trace5.csv")
    assert run(tmp_path, "analyze", "grid", trace, "--tips", "20", "--delays", "500") == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "grid.csv").read_text())))
    assert rows == [{"tip_pct": "20.000000", "vdf_delay_s": "500.000000", "count": "1",
                     "total": "5", "probability": "0.200000"}]


def test_analyze_missing_column(tmp_path, capsys):
    p = tmp_path / "t.csv"
    p.write_text("block_number,tx_id,base_fee_wei,miner_tip_wei,gas_price_wei\n1,a,1,1,1\n")
    assert run(tmp_path, "analyze", "grid", str(p)) == 1
    assert "SchemaMismatch" in capsys.readouterr().err


def test_analyze_recommend_trivial(tmp_path, data_dir):
    trace = os.path.join(data_dir, "trace5.csv")
    assert run(tmp_path, "analyze", "recommend", trace, "--target", "1.0",
               "--delays", "100,500") == 0
    doc = json.loads((tmp_path / "recommendation.json").read_text())
    assert (doc["recommended_tip_pct"], doc["t1_seconds"]) == (0.0, 100.0)


def test_analyze_infeasible(tmp_path, data_dir, capsys):
    trace = os.path.join(data_dir, "trace5.csv")
    assert run(tmp_path, "analyze", "recommend", trace, "--target", "0", "--tips", "0:25:5",
               "--delays", "100") == 1
    assert "Infeasible" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["nope"], ["vdf"], ["vdf", "eval"],
                                  ["setup", "--verifiers", "x"],
                                  ["analyze", "grid", "f.csv", "--tips", "a:b"]])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_missing_file_is_domain_error(tmp_path):
    assert main(["vdf", "verify", str(tmp_path / "absent.json")]) == 1


def test_parse_grid():
    assert parse_grid("0:10:5") == [0, 5, 10]
    assert parse_grid("100,500") == [100, 500]
