import json
import subprocess
import sys

import pytest

from packseq.catalog import write_catalog, write_dataset
from packseq.cli import main
from packseq.markov import START, MarkovChain, save_chain
from util import demo, make_catalog


@pytest.fixture
def workdir(tmp_path):
    catalog = make_catalog(["a", "b", "c", "d"])
    write_catalog(catalog, tmp_path / "catalog.jsonl")
    demos = [
        demo("s1", ["a", "b", "c", "d"]),
        demo("s2", ["a", "b", "c"]),
        demo("s3", ["b", "c", "d"]),
        demo("s4", ["a", "c", "d"]),
    ]
    write_dataset(demos, tmp_path / "demos.jsonl")
    chain = MarkovChain(
        {
            START: [("a", 0.75), ("b", 0.25)],
            "a": [("b", 2 / 3), ("c", 1 / 3)],
            "b": [("c", 1.0)],
            "c": [("d", 1.0)],
        }
    )
    save_chain(chain, tmp_path / "truth.json")
    return tmp_path


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_train_writes_chain(workdir, capsys):
    code, out, err = run(
        [
            "train",
            "--dataset", str(workdir / "demos.jsonl"),
            "--catalog", str(workdir / "catalog.jsonl"),
            "--threshold", "0.0",
            "--out", str(workdir / "chain.json"),
        ],
        capsys,
    )
    assert code == 0, err
    assert (workdir / "chain.json").exists()
    assert "trained chain" in out


def test_train_degenerate_threshold(workdir, capsys):
    code, out, err = run(
        [
            "train",
            "--dataset", str(workdir / "demos.jsonl"),
            "--threshold", "1.1",
            "--out", str(workdir / "nope.json"),
        ],
        capsys,
    )
    assert code != 0
    assert "degenerate model" in err
    assert not (workdir / "nope.json").exists()


def test_plan_beam_modes(workdir, capsys):
    code, out, err = run(
        [
            "plan",
            "--chain", str(workdir / "truth.json"),
            "--objects", "a,b,c,d",
            "--mode", "beam-n",
            "--format", "json",
        ],
        capsys,
    )
    assert code == 0, err
    payload = json.loads(out)
    assert payload["sequence"] == ["a", "b", "c", "d"]
    assert payload["leftovers"] == []

    code, out, _ = run(
        [
            "plan",
            "--chain", str(workdir / "truth.json"),
            "--objects", "a,b,c,d",
            "--mode", "beam-3",
            "--max-len", "3",
            "--format", "json",
        ],
        capsys,
    )
    assert code == 0
    payload = json.loads(out)
    assert sorted(payload["sequence"]) == ["a", "b", "c", "d"]
    assert max(s["chunk"] for s in payload["steps"]) >= 1


def test_plan_random_is_reproducible(workdir, capsys):
    args = ["plan", "--objects", "a,b,c,d", "--mode", "random", "--seed", "7"]
    code1, out1, _ = run(args, capsys)
    code2, out2, _ = run(args, capsys)
    assert code1 == code2 == 0
    assert out1 == out2


def test_plan_rejects_unknown_catalog_objects(workdir, capsys):
    code, _, err = run(
        [
            "plan",
            "--catalog", str(workdir / "catalog.jsonl"),
            "--objects", "a,zzz",
            "--mode", "random",
        ],
        capsys,
    )
    assert code != 0
    assert "zzz" in err


def test_plan_duplicate_objects(workdir, capsys):
    code, _, err = run(["plan", "--objects", "a,a", "--mode", "random"], capsys)
    assert code != 0 and "duplicate" in err


def test_analyze_report(workdir, capsys):
    code, out, err = run(
        [
            "analyze",
            "--dataset", str(workdir / "demos.jsonl"),
            "--catalog", str(workdir / "catalog.jsonl"),
            "--format", "json",
        ],
        capsys,
    )
    assert code == 0, err
    payload = json.loads(out)
    assert payload["scenes"] == 4
    assert payload["manipulations"] == 13
    assert payload["std_convention"] == "population"


def test_stats_subcommand_reports_study_values(workdir, capsys):
    code, out, err = run(
        ["stats", "--table", "15,2,8,8", "--pair-test", "boschloo", "--format", "json"],
        capsys,
    )
    assert code == 0, err
    payload = json.loads(out)
    assert payload["boschloo_p"] == pytest.approx(0.0099, abs=0.0015)
    assert payload["fisher_one_sided_p"] == pytest.approx(0.0211, abs=0.0001)
    assert payload["effect_band"] == "large"


def test_stats_bad_table(workdir, capsys):
    code, _, err = run(["stats", "--table", "1,2,3"], capsys)
    assert code != 0 and "table" in err


def test_synth_then_train_round(workdir, capsys):
    code, _, err = run(
        [
            "synth",
            "--chain", str(workdir / "truth.json"),
            "--catalog", str(workdir / "catalog.jsonl"),
            "--container", "0.1x0.1x0.5",
            "--n", "50",
            "--seed", "3",
            "--out", str(workdir / "synth.jsonl"),
        ],
        capsys,
    )
    assert code == 0, err
    code, _, err = run(
        [
            "train",
            "--dataset", str(workdir / "synth.jsonl"),
            "--catalog", str(workdir / "catalog.jsonl"),
            "--threshold", "0.0",
            "--out", str(workdir / "learned.json"),
        ],
        capsys,
    )
    assert code == 0, err


def test_build_pool_and_serve_config(workdir, capsys):
    code, out, err = run(
        [
            "evaluate", "build-pool",
            "--dataset", str(workdir / "demos.jsonl"),
            "--catalog", str(workdir / "catalog.jsonl"),
            "--chain", str(workdir / "truth.json"),
            "--per-type", "2",
            "--seed", "0",
            "--timestamp", "2026-01-01T00:00:00+00:00",
            "--out", str(workdir / "pool.jsonl"),
            "--format", "json",
        ],
        capsys,
    )
    assert code == 0, err
    payload = json.loads(out)
    assert payload["trials"] == 8
    lines = (workdir / "pool.jsonl").read_text().strip().splitlines()
    assert len(lines) == 8


def test_missing_file_is_diagnosed(workdir, capsys):
    code, _, err = run(
        ["train", "--dataset", str(workdir / "missing.jsonl"), "--out", str(workdir / "x")],
        capsys,
    )
    assert code != 0
    assert "missing.jsonl" in err


def test_plan_table_cache_reused_and_refreshed(workdir, capsys):
    from packseq.levels import load_level_table
    from packseq.markov import load_chain

    cache = workdir / "table-cache.json"
    args = [
        "plan",
        "--chain", str(workdir / "truth.json"),
        "--objects", "a,b,c,d",
        "--mode", "beam-n",
        "--table-cache", str(cache),
        "--format", "json",
    ]
    code1, out1, _ = run(args, capsys)
    assert code1 == 0 and cache.exists()
    truth_hash = load_chain(workdir / "truth.json").content_hash()
    assert load_level_table(cache).chain_hash == truth_hash
    code2, out2, _ = run(args, capsys)  # second run hits the cache
    assert code2 == 0 and out1 == out2


def test_serve_env_fallbacks(workdir, monkeypatch):
    from packseq.cli import build_parser

    monkeypatch.setenv("PACKSEQ_POOL", str(workdir / "pool.jsonl"))
    monkeypatch.setenv("PACKSEQ_LOG", str(workdir / "log.jsonl"))
    monkeypatch.setenv("PACKSEQ_PORT", "8123")
    monkeypatch.setenv("PACKSEQ_SEED", "9")
    args = build_parser().parse_args(["serve"])
    assert args.pool == str(workdir / "pool.jsonl")
    assert args.log == str(workdir / "log.jsonl")
    assert args.port == 8123
    assert args.seed == 9


def test_module_entry_point_help():
    proc = subprocess.run(
        [sys.executable, "-m", "packseq.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "train" in proc.stdout and "serve" in proc.stdout
