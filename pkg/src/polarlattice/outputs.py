"""Deterministic file output: CSV/JSON writers, checksums, run manifest.

All writers are atomic (temp file + rename in the target directory) so
concurrent sweep points never interleave, and formatting is fixed
(12 significant digits, '.' decimal separator, LF line endings) so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from pathlib import Path


def fmt(value) -> str:
    """Canonical cell formatting: floats at 12 significant digits."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_text_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, columns, rows, config_sha: str, comment: str = "") -> None:
    """CSV with a one-line '#' header carrying the config checksum."""
    head = f"# config_sha256={config_sha}"
    if comment:
        head += f" {comment}"
    lines = [head, ",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    write_text_atomic(path, "\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=1, sort_keys=True) + "\n")


def config_checksum(raw: dict) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON of a config."""
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


MANIFEST_NAME = "run_manifest.json"


class RunRecorder:
    """Collects stage timings and writes the run manifest.

    The manifest lists every file under the output directory (except
    itself) with size and SHA-256, echoes the configuration, and keeps
    per-stage wall times.
    """

    def __init__(self, outdir: Path, raw_config: dict, version: str):
        self.outdir = Path(outdir)
        self.raw_config = raw_config
        self.version = version
        self.stage_timings: dict[str, float] = {}
        self._t0 = time.perf_counter()

    def stage(self, name: str):
        recorder = self

        class _Stage:
            def __enter__(self):
                self.t = time.perf_counter()
                return self

            def __exit__(self, *exc):
                recorder.stage_timings[name] = recorder.stage_timings.get(
                    name, 0.0
                ) + (time.perf_counter() - self.t)
                return False

        return _Stage()

    def write(self) -> Path:
        files = []
        for p in sorted(self.outdir.rglob("*")):
            if p.is_file() and p.name != MANIFEST_NAME:
                files.append(
                    {
                        "path": str(p.relative_to(self.outdir)),
                        "bytes": p.stat().st_size,
                        "sha256": sha256_file(p),
                    }
                )
        manifest = {
            "config": self.raw_config,
            "config_sha256": config_checksum(self.raw_config),
            "code_version": self.version,
            "wall_time_s": time.perf_counter() - self._t0,
            "stage_timings_s": {k: round(v, 6) for k, v in self.stage_timings.items()},
            "files": files,
        }
        path = self.outdir / MANIFEST_NAME
        write_json(path, manifest)
        return path
