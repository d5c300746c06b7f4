import json
import os
import pathlib

import pytest

import relevance

FIXTURES = pathlib.Path(os.environ.get("RELEVANCE_FIXTURE_DIR", pathlib.Path(__file__).parents[1] / "fixtures"))


def test_generate_is_seeded():
    a = relevance.generate("coffee", "simple", 3)
    b = relevance.generate("coffee", "simple", 3)
    assert a == b
    assert a["case_id"] == "coffee-simple-3"
    assert "coffee" in a["ground_truth_relevant"]


def test_determine_on_generated_instance():
    inst = relevance.generate("coffee", "simple", 0)
    result = relevance.determine(inst["scene"], inst["table"], cues=inst["cues"])
    assert result["sufficient"]
    assert set(result["relevant_elements"]) <= set(result["closed_elements"])
    assert "coffee" in result["relevant_elements"]


def test_determine_without_cues_is_insufficient():
    inst = relevance.generate("coffee", "simple", 0)
    result = relevance.determine(inst["scene"], inst["table"])
    assert not result["sufficient"]


def test_score_prediction():
    s = relevance.score_prediction(["a", "b"], ["a", "c"])
    assert s["precision"] == pytest.approx(0.5)
    assert s["recall"] == pytest.approx(0.5)
    assert s["f1"] == pytest.approx(0.5)
    with pytest.raises(relevance.RelevanceError, match="EmptyTruth"):
        relevance.score_prediction(["a"], [])


def test_sweep_summary_has_25_cells():
    summary = relevance.sweep(cases=3)
    assert len(summary["cells"]) == 25
    assert summary["rows"] == 75


def test_demo_log_matches_fixture():
    records = relevance.run_demo()
    golden = [json.loads(line) for line in (FIXTURES / "demo_log.jsonl").read_text().splitlines()]
    assert records == golden
    outcomes = [r for r in records if r["kind"] in ("determination", "decision")]
    assert outcomes == [r for r in relevance.run_demo(concurrent=True) if r["kind"] in ("determination", "decision")]


def test_export_pddl_mentions_typing():
    domain, problem = relevance.export_pddl("coffee", "simple", 0)
    assert ":typing" in domain
    assert "(:goal" in problem


def test_plan_bench_deterministic_time():
    a = relevance.plan_bench(cases=2, methods=["relevance"], deterministic_time=True)
    b = relevance.plan_bench(cases=2, methods=["relevance"], deterministic_time=True)
    assert a == b
    assert a["rows"][0]["success_rate"] == 1.0
