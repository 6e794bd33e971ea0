"""Shared helpers for the on-disk formats."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path


def canonical_json(data) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline.

    Equal values always serialize to equal bytes, which golden-file tests,
    version control diffs and the byte-determinism contracts rely on.
    """
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write via a temp file in the same directory plus rename, so readers
    never observe a torn file even if the process dies mid-write."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
