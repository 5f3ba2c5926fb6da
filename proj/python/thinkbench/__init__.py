"""Benchmark language models on basic math reasoning and measure overthinking."""

import json
import os

from ._thinkbench import (
    REPORT_SCHEMA_VERSION,
    BackendError,
    ConfigError,
    ReportIOError,
    overthinking_score,
    task_names,
    token_efficiency,
)
from . import _thinkbench as _core

__all__ = [
    "REPORT_SCHEMA_VERSION",
    "BackendError",
    "ConfigError",
    "ReportIOError",
    "compare",
    "default_templates",
    "evaluate",
    "extract",
    "generate",
    "overthinking_score",
    "task_names",
    "token_efficiency",
]


def generate(tasks=("sorting",), datapoints=1000, folds=1, range=(-100, 100), list_sizes=(8,), seed=None):
    """Dataset records, one dict per instance."""
    text = _core.generate_jsonl(list(tasks), datapoints, folds, tuple(range), list(list_sizes), seed)
    return [json.loads(line) for line in text.splitlines()]


def extract(text, task, numbers=()):
    """Parsed final answer of a response, with its tier."""
    return json.loads(_core.extract_json(text, task, list(numbers)))


def evaluate(
    model_id="",
    tasks=("sorting",),
    datapoints=1000,
    folds=1,
    range=(-100, 100),
    list_sizes=(8,),
    temperature=0.7,
    top_p=1.0,
    max_tokens=512,
    store_details=False,
    output_dir=None,
    seed=None,
    backend="openai",
    endpoint="http://localhost:8000/v1",
    api_key_env="OPENAI_API_KEY",
    concurrency=8,
    max_retries=3,
    mock_script="perfect",
    pad_factor=10,
    fail_rate=0.0,
    fail_seed=0,
    run_id=None,
):
    """Run the benchmark and return the summary.

    Reports are written when output_dir is given.
    """
    if output_dir is not None:
        output_dir = os.fspath(output_dir)
    text = _core.evaluate_json(
        model_id, list(tasks), datapoints, folds, tuple(range), list(list_sizes), temperature, top_p,
        max_tokens, store_details, output_dir, seed, backend, endpoint, api_key_env, concurrency,
        max_retries, mock_script, pad_factor, fail_rate, fail_seed, run_id,
    )
    return json.loads(text)


def compare(summary_files):
    """Leaderboard over summary.json files under shared cohort bounds."""
    return json.loads(_core.compare_json([os.fspath(p) for p in summary_files]))


def default_templates():
    return json.loads(_core.default_templates())
