"""Relevance determination engine and benchmark harness (Python bindings)."""

import json

from . import _relevance
from ._relevance import RelevanceError, export_pddl, score_prediction

__all__ = [
    "RelevanceError",
    "determine",
    "export_pddl",
    "generate",
    "inquiry_bench",
    "plan_bench",
    "run_demo",
    "score_prediction",
    "sweep",
]


def generate(domain, difficulty, seed):
    """Instance metadata plus its scene and oracle table documents."""
    return json.loads(_relevance.generate_json(domain, difficulty, seed))


def determine(scene, table, objective="", cues=(), tau_c=0.2, tau_e=0.2, tau_necessary=0.9, h_max_fraction=0.5):
    """`scene` and `table` are dicts in the on-disk JSON layout."""
    return json.loads(
        _relevance.determine_json(
            json.dumps(scene), json.dumps(table), objective, list(cues), tau_c, tau_e, tau_necessary, h_max_fraction
        )
    )


def sweep(domain="coffee", difficulty="simple", cases=30, seed=0, provider="table"):
    return json.loads(_relevance.sweep_json(domain, difficulty, cases, seed, provider))


def plan_bench(domain="coffee", difficulty="simple", cases=30, seed=0, timeout=120.0,
               methods=("relevance", "pure_planning", "random_relevance"), deterministic_time=False):
    return json.loads(
        _relevance.plan_bench_json(domain, difficulty, cases, seed, timeout, list(methods), deterministic_time)
    )


def inquiry_bench(domain="coffee", difficulty="simple", cases=30, seed=0):
    return json.loads(_relevance.inquiry_bench_json(domain, difficulty, cases, seed))


def run_demo(concurrent=False):
    """Episode log records of the built-in two-person coffee scenario."""
    return [json.loads(line) for line in _relevance.run_demo_jsonl(concurrent).splitlines()]
