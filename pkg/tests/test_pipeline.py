import json
import shutil

import pytest

from hrex.cli import main
from hrex.dataset import SentenceSample, dumps_sample
from hrex.errors import EmptyInput, IdMismatch, MetricUnknown, TooFewRuns
from hrex.pipeline import EvalOptions, cmd_eval, cmd_report, cmd_repro


@pytest.fixture
def replay10(fixtures_dir):
    return fixtures_dir / "replay10"


def write_samples(path, n=3):
    samples = [SentenceSample(f"s{i}", f"Sentence number {i}.") for i in range(n)]
    path.write_text("".join(dumps_sample(s) + "\n" for s in samples), encoding="utf-8")
    return path


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_extract_mock(tmp_path):
    data = write_samples(tmp_path / "d.jsonl")
    out = tmp_path / "rec.jsonl"
    code = main(["extract", "--dataset", str(data), "--backend", "mock", "--mock-text", "(a | capital of | b)",
                 "--out", str(out)])
    assert code == 0
    records = read_jsonl(out)
    assert [r["id"] for r in records] == ["s0", "s1", "s2"]
    assert records[0]["runs"][0]["facts"] == [{"head": "a", "relation": "capital of", "tail": "b", "qualifiers": []}]
    manifest = json.loads((tmp_path / "rec.jsonl.manifest.json").read_text())
    assert manifest["counts"]["samples"] == 3 and manifest["config"]["backend"] == "mock"
    assert "started_at" in manifest["timing"]

    first = out.read_bytes()
    assert main(["extract", "--dataset", str(data), "--backend", "mock", "--mock-text", "(a | capital of | b)",
                 "--out", str(out), "--jobs", "3"]) == 0
    assert out.read_bytes() == first


def test_extract_replay_missing_fixture(tmp_path, replay10):
    fixtures = tmp_path / "fx"
    shutil.copytree(replay10 / "responses", fixtures)
    gold = replay10 / "gold.jsonl"
    subset = tmp_path / "three.jsonl"
    subset.write_text("".join(gold.read_text().splitlines(keepends=True)[:3]))
    # Drop the run-0 fixture of the second sample.
    victim = next(p for p in sorted(fixtures.glob("*.json"))
                  if json.loads(p.read_text()).get("sample_id") == "r10-02" and json.loads(p.read_text())["run_index"] == 0)
    victim.unlink()
    out = tmp_path / "rec.jsonl"
    code = main(["extract", "--dataset", str(subset), "--backend", "replay", "--fixtures", str(fixtures),
                 "--out", str(out)])
    assert code == 1
    records = read_jsonl(out)
    assert [r["error"] is None for r in records] == [True, False, True]
    assert records[1]["error"]["type"] == "ReplayMiss" and records[1]["error"]["run_index"] == 0


def test_extract_cache_rerun_identical(tmp_path):
    data = write_samples(tmp_path / "d.jsonl")
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["extract", "--dataset", str(data), "--backend", "mock", "--mock-text", "(x | r | y)",
            "--cache", str(tmp_path / "cache"), "--runs", "2"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    m2 = json.loads((tmp_path / "b.jsonl.manifest.json").read_text())
    assert m2["counts"]["backend_calls"] == 0 and m2["counts"]["cache_hits"] == 6


def test_extract_limit_seed(tmp_path):
    data = write_samples(tmp_path / "d.jsonl", n=10)
    out = tmp_path / "rec.jsonl"
    main(["extract", "--dataset", str(data), "--backend", "mock", "--out", str(out), "--limit", "4", "--seed", "9"])
    assert len(read_jsonl(out)) == 4


def test_fatal_config_error_exit_2(tmp_path, monkeypatch, capsys):
    data = write_samples(tmp_path / "d.jsonl")
    monkeypatch.delenv("HREX_API_KEY", raising=False)
    assert main(["extract", "--dataset", str(data), "--backend", "http", "--out", str(tmp_path / "o")]) == 2
    assert main(["extract", "--dataset", str(tmp_path / "missing.jsonl"), "--backend", "mock",
                 "--out", str(tmp_path / "o")]) == 2
    assert "error" in capsys.readouterr().err


def test_eval_identical_exact(replay10, tmp_path):
    gold = replay10 / "gold.jsonl"
    rep = cmd_eval(gold, gold, EvalOptions(metric="exact"))
    assert (rep.micro.precision, rep.micro.recall, rep.micro.f1) == (1.0, 1.0, 1.0)


def test_eval_empty_predictions(replay10, tmp_path):
    gold = replay10 / "gold.jsonl"
    empty = tmp_path / "empty.jsonl"
    empty.write_text("".join(json.dumps({**json.loads(l), "facts": []}) + "\n" for l in gold.read_text().splitlines()))
    rep = cmd_eval(gold, empty, EvalOptions(metric="exact"))
    assert (rep.micro.precision, rep.micro.recall, rep.micro.f1) == (0.0, 0.0, 0.0)


def test_eval_soft_exact_identical(replay10):
    gold = replay10 / "gold.jsonl"
    rep = cmd_eval(gold, gold, EvalOptions(metric="soft", sim="exact"))
    assert rep.micro.f1 == 1.0 and rep.macro.f1 == 1.0


def test_eval_errors(replay10, tmp_path):
    gold = replay10 / "gold.jsonl"
    with pytest.raises(MetricUnknown):
        cmd_eval(gold, gold, EvalOptions(metric="bleu"))
    other = write_samples(tmp_path / "o.jsonl")
    with pytest.raises(IdMismatch):
        cmd_eval(gold, other, EvalOptions())


def test_eval_cli_writes_json_and_csv(replay10, tmp_path):
    gold = replay10 / "gold.jsonl"
    out, csv_path = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["eval", "--metric", "soft", "--sim", "token_f1", "--gold", str(gold), "--pred", str(gold),
                 "--out", str(out), "--csv", str(csv_path)]) == 0
    rep = json.loads(out.read_text())
    assert rep["metric"] == "soft" and rep["params"]["sim"] == "token_f1"
    assert set(rep) >= {"metric", "params", "per_sample", "micro", "macro"}
    assert len(csv_path.read_text().splitlines()) == 1 + 10 + 2
    assert main(["eval", "--metric", "nope", "--gold", str(gold), "--pred", str(gold)]) == 2


def _records(tmp_path, runs_by_id):
    path = tmp_path / "rec.jsonl"
    lines = []
    for sid, runs in runs_by_id.items():
        lines.append(json.dumps({"id": sid, "text": "t", "runs": [{"run_index": i, "raw_text": r, "facts": []}
                                                                   for i, r in enumerate(runs)], "error": None}))
    path.write_text("\n".join(lines) + "\n")
    return path


def test_repro_mock_identical(tmp_path):
    data = write_samples(tmp_path / "d.jsonl")
    out = tmp_path / "rec.jsonl"
    main(["extract", "--dataset", str(data), "--backend", "mock", "--mock-text", "(a | r | b)", "--runs", "3",
          "--out", str(out)])
    assert cmd_repro(out).corpus_score == 1.0


def test_repro_one_char(tmp_path):
    assert cmd_repro(_records(tmp_path, {"s": ["abc", "abd"]})).corpus_score == pytest.approx(0.6667, abs=1e-4)


def test_repro_too_few_runs(tmp_path, capsys):
    path = _records(tmp_path, {"s": ["abc"]})
    with pytest.raises(TooFewRuns):
        cmd_repro(path)
    assert main(["repro", "--pred", str(path)]) == 2


def test_repro_cli_percentage(tmp_path, capsys):
    main(["repro", "--pred", str(_records(tmp_path, {"s": ["abc", "abd"]}))])
    captured = capsys.readouterr()
    assert "66.67%" in captured.err
    assert json.loads(captured.out)["corpus_score"] == pytest.approx(2 / 3)


def _report(metric, model="m", **params):
    prf = {"precision": 0.5, "recall": 0.25, "f1": 1 / 3, "n_pred": 2, "n_gold": 4, "n_matched": 1}
    return {"metric": metric, "model": model, "params": params, "micro": prf, "macro": prf,
            "per_sample": [], "provenance": {}}


def test_report_single_table():
    text = cmd_report([_report("exact", ignore_case=False)])
    assert text.count("## ") == 2  # one metric family plus provenance
    assert "| m | 0.50 | 0.25 | 0.33 |" in text


def test_report_two_families():
    text = cmd_report([_report("exact"), _report("soft", sim="trigram")])
    assert "## Exact match" in text and "## Soft match" in text


def test_report_param_clash_not_merged():
    text = cmd_report([_report("soft", "a", sim="trigram"), _report("soft", "b", sim="exact")])
    assert "Note:" in text
    assert text.count("Parameters:") == 2


def test_report_empty():
    with pytest.raises(EmptyInput):
        cmd_report([])


def test_convert_cli(tmp_path, fixtures_dir, capsys):
    out = tmp_path / "c.jsonl"
    assert main(["convert", "hyperred", "--in", str(fixtures_dir / "hyperred_sample.json"), "--out", str(out)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["facts_emitted"] == 3 and stats["records_skipped"] == 1
