"""Canonical output directory layout.

Every writer imports its paths from here.  No other module should compute
output paths independently.

Layout
------
runs/                         # default output root (``--output-dir`` overrides)
  <subcommand>/
    <table>.csv               # per-subcommand result tables
    timeseries.csv            # simulate only
    decay_fit.json            # simulate / decay-fit
    summary.json              # pass/fail per check, key numbers
    events.jsonl              # one CheckEvent per line
    manifest.json             # resolved config, versions, wall time, sha256 of artifacts
"""

import os
from typing import Optional

_PROJECT_ROOT = os.path.normpath(os.path.join(os.path.dirname(__file__), ".."))
OUTPUT_ROOT = os.path.join(_PROJECT_ROOT, "runs")
CONFIG_DIR = os.path.join(_PROJECT_ROOT, "config")
PROFILES_DIR = os.path.join(_PROJECT_ROOT, "profiles")


def _ensure(path: str) -> str:
    """Create directory if needed, return the path."""
    os.makedirs(path, exist_ok=True)
    return path


def run_dir(subcommand: str, root: Optional[str] = None) -> str:
    """``<root>/<subcommand>/``"""
    return _ensure(os.path.join(root or OUTPUT_ROOT, subcommand))


def table_path(run: str, name: str) -> str:
    return os.path.join(run, f"{name}.csv")


def summary_path(run: str) -> str:
    return os.path.join(run, "summary.json")


def events_path(run: str) -> str:
    return os.path.join(run, "events.jsonl")


def manifest_path(run: str) -> str:
    return os.path.join(run, "manifest.json")


def decay_fit_path(run: str) -> str:
    return os.path.join(run, "decay_fit.json")


def default_config_path() -> str:
    """``config/config.yaml``; may not exist."""
    return os.path.join(CONFIG_DIR, "config.yaml")


def profile_path(name: str) -> str:
    """``profiles/<name>.yaml``"""
    return os.path.join(PROFILES_DIR, f"{name}.yaml")
