"""Run manifests: config snapshot, input checksums, deterministic run id.

The run id hashes the effective config and the input file checksums, so two
runs over identical inputs with identical settings share an id. Timestamps
live only in the manifest body, never in the id.
"""

from __future__ import annotations

import hashlib
import json
import subprocess
from dataclasses import dataclass
from datetime import datetime, timezone


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def interpreter_version(interpreter: str) -> str:
    """Ask the configured interpreter for its version; fatal if it cannot
    run, since every sandbox execution depends on it."""
    try:
        out = subprocess.check_output(
            [interpreter, "-V"], text=True, stderr=subprocess.STDOUT, timeout=30
        )
    except (OSError, subprocess.SubprocessError) as exc:
        raise RuntimeError(f"interpreter {interpreter!r} is not runnable: {exc}") from exc
    return out.strip()


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    config_snapshot: dict
    interpreter_version: str
    input_checksums: dict[str, str]
    created_at: str

    def as_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "config_snapshot": self.config_snapshot,
            "interpreter_version": self.interpreter_version,
            "input_checksums": dict(self.input_checksums),
            "created_at": self.created_at,
        }

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def build_manifest(
    config: dict, input_paths: list[str], interpreter: str
) -> RunManifest:
    checksums = {path: file_sha256(path) for path in sorted(input_paths)}
    version = interpreter_version(interpreter)
    seed = json.dumps(
        {"config": config, "inputs": checksums}, sort_keys=True, default=str
    )
    run_id = hashlib.sha256(seed.encode("utf-8")).hexdigest()[:12]
    return RunManifest(
        run_id=run_id,
        config_snapshot=config,
        interpreter_version=version,
        input_checksums=checksums,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
