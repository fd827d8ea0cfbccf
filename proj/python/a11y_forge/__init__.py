"""Python access to the a11y-forge rule engine, response parser and evaluator."""

import json
from pathlib import Path

from . import _core
from ._core import ConfigError, Error, FormatError, IoError

__all__ = [
    "ConfigError",
    "Error",
    "FormatError",
    "IoError",
    "evaluate_corpus",
    "parse_response",
    "parse_toml",
    "render_config",
    "rule_ids",
    "scan_file",
    "scan_text",
    "strip_annotation",
]


def scan_text(text, path, rules=None):
    """Diagnostics for `text`; the flavor comes from the extension of `path`."""
    return json.loads(_core.scan_text(text, str(path), rules))


def scan_file(path, rules=None):
    return json.loads(_core.scan_file(str(path), rules))


def rule_ids():
    return sorted(_core.rule_ids())


def parse_toml(text):
    """The configuration reader's view of a TOML document."""
    return json.loads(_core.parse_toml(text))


def render_config(text, base_dir="."):
    return _core.render_config(text, Path(base_dir))


def parse_response(raw, schema="fixes"):
    """Structured extraction of a model response: findings, fixes or chain_fixes."""
    return json.loads(_core.parse_response(raw, schema))


def strip_annotation(text):
    return _core.strip_annotation(text)


def evaluate_corpus(corpus_dir, out_dir, jobs=0):
    """Runs both use cases over the corpus with its replay fixtures and
    returns the summary text; results.json and summary.txt go to `out_dir`."""
    return _core.evaluate_corpus(Path(corpus_dir), Path(out_dir), jobs)
