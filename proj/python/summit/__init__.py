"""Iterative summarize/evaluate/refine loop with a native core."""

import json

from ._summit import (
    BackendError,
    ConfigError,
    DegenerateDistribution,
    EmptyInput,
    Error,
    FileNotFound,
    ParseError,
    expected_score,
    parse_edit_ops,
    rouge_l,
    rouge_n,
    surface_form,
    tokenize,
    topic_similarity,
    version,
    word_count,
)
from . import _summit

__all__ = [
    "BackendError",
    "ConfigError",
    "DegenerateDistribution",
    "EmptyInput",
    "Error",
    "FileNotFound",
    "ParseError",
    "expected_score",
    "parse_edit_ops",
    "parse_feedback",
    "rouge_l",
    "rouge_n",
    "run_experiment",
    "run_session",
    "surface_form",
    "tokenize",
    "topic_similarity",
    "version",
    "word_count",
]


def parse_feedback(raw, stop_marker="<STOP>", strict=False):
    return json.loads(_summit._parse_feedback(raw, stop_marker, strict))


def run_session(document, script, config=None, doc_id="doc"):
    """Run one session against a scripted backend.

    `script` is a script-file dict (or its JSON text). Returns the trace as a
    list of dicts: the header line first, then one entry per iteration.
    """
    if not isinstance(script, str):
        script = json.dumps(script)
    lines = _summit._run_session(document, script, json.dumps(config or {}), doc_id)
    return [json.loads(line) for line in lines.splitlines() if line]


def run_experiment(manifest, output_dir=None, replay=False):
    """Run a manifest and return the parsed stats."""
    return json.loads(_summit._run_experiment(str(manifest), output_dir and str(output_dir), replay))
