"""Run manifest: generates and validates manifest.json beside the outputs.

The manifest echoes the resolved configuration and tolerances, the package
version, seed and wall time, and the SHA-256 of every artifact the run
wrote, so a run directory can be checked for drift after the fact.
"""

import hashlib
import json
import os
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

from src import __version__

MANIFEST_VERSION = 1
HASH_ALGO = "sha256"


def _sha256(path: str) -> str:
    """Return hex SHA-256 of the file at *path*."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def build_manifest(
    subcommand: str,
    run_dir: str,
    artifacts: Iterable[str],
    config: Dict[str, Any],
    seed: Optional[int] = None,
    wall_time: float = 0.0,
    passed: Optional[bool] = None,
) -> Dict[str, Any]:
    """Manifest dict for the files in *artifacts* (paths relative to or inside *run_dir*)."""
    entries: List[Dict[str, Any]] = []
    for path in artifacts:
        abs_path = path if os.path.isabs(path) else os.path.join(run_dir, path)
        entries.append({
            "path": os.path.relpath(abs_path, run_dir),
            "sha256": _sha256(abs_path),
            "bytes": os.path.getsize(abs_path),
        })
    return {
        "manifest_version": MANIFEST_VERSION,
        "generated_utc": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "hash_algo": HASH_ALGO,
        "package_version": __version__,
        "subcommand": subcommand,
        "seed": seed,
        "wall_time_seconds": round(float(wall_time), 3),
        "passed": passed,
        "config": config,
        "tolerances": dict(config.get("tolerances", {})),
        "artifacts": entries,
    }


def save_manifest(manifest: Dict[str, Any], path: str) -> str:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, ensure_ascii=False, default=str)
    return path


def load_manifest(path: str) -> Optional[Dict[str, Any]]:
    """Read a persisted manifest.json.  Returns None if missing."""
    if not os.path.isfile(path):
        return None
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


_REQUIRED_TOP_KEYS = {"manifest_version", "generated_utc", "hash_algo", "package_version",
                      "subcommand", "seed", "wall_time_seconds", "config", "tolerances", "artifacts"}
_REQUIRED_ENTRY_KEYS = {"path", "sha256", "bytes"}


def validate_manifest(manifest: Dict[str, Any], run_dir: str, check_hashes: bool = True) -> Dict[str, Any]:
    """Validate a manifest dict.  Returns ``{"valid": bool, "errors": [str]}``.

    Checks:
    - All required top-level and per-artifact keys present
    - No duplicate artifact paths
    - Artifacts exist on disk
    - SHA-256 matches live content (if *check_hashes* is True)
    """
    errors: List[str] = []
    for key in sorted(_REQUIRED_TOP_KEYS):
        if key not in manifest:
            errors.append(f"missing top-level key: {key}")
    if manifest.get("hash_algo", HASH_ALGO) != HASH_ALGO:
        errors.append(f"unsupported hash_algo '{manifest.get('hash_algo')}'")

    artifacts = manifest.get("artifacts", [])
    if not isinstance(artifacts, list):
        errors.append("'artifacts' must be a list")
        return {"valid": False, "errors": errors}

    seen: set = set()
    for idx, entry in enumerate(artifacts):
        prefix = f"artifacts[{idx}]"
        for key in sorted(_REQUIRED_ENTRY_KEYS):
            if key not in entry:
                errors.append(f"{prefix}: missing key '{key}'")
        rel_path = entry.get("path", "")
        if rel_path in seen:
            errors.append(f"{prefix}: duplicate path '{rel_path}'")
        seen.add(rel_path)
        abs_path = os.path.join(run_dir, rel_path)
        if not rel_path or not os.path.isfile(abs_path):
            errors.append(f"{prefix}: artifact not found: {rel_path}")
            continue
        if check_hashes:
            live = _sha256(abs_path)
            if live != entry.get("sha256"):
                errors.append(
                    f"{prefix}: sha256 drift for '{rel_path}' "
                    f"(manifest={str(entry.get('sha256', ''))[:12]}… live={live[:12]}…)"
                )
    return {"valid": len(errors) == 0, "errors": errors}
