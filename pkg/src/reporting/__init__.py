"""Run artifacts: check events (JSONL), CSV tables, JSON summaries and the hashed manifest."""

from src.reporting.events import CheckEvent, CheckLogger, build_event
from src.reporting.manifest import build_manifest, load_manifest, save_manifest, validate_manifest
from src.reporting.tables import format_value, read_json, read_table, write_json, write_table

__all__ = [
    "CheckEvent",
    "CheckLogger",
    "build_event",
    "build_manifest",
    "format_value",
    "load_manifest",
    "read_json",
    "read_table",
    "save_manifest",
    "validate_manifest",
    "write_json",
    "write_table",
]
