"""Byte-stable JSON reading and writing for workspace stores.

Every store file is UTF-8, two-space indented, with sorted keys and a
trailing newline, so rewriting an unchanged store is byte-identical and
fixtures diff cleanly.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from sciwb.errors import SciwbError


def dumps_bytes(obj) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n").encode("utf-8")


def loads_bytes(data: bytes, location: str):
    try:
        return json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise SciwbError(f"not valid UTF-8: {exc}", location=location)
    except json.JSONDecodeError as exc:
        raise SciwbError(f"malformed JSON: {exc.msg} (line {exc.lineno} column {exc.colno})",
                         location=location)


def read_json(path: Path):
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise SciwbError("file not found", location=str(path))
    return loads_bytes(data, location=str(path))


def write_json_atomic(path: Path, obj) -> None:
    """Write via a temp file + rename so a failure leaves the old bytes intact."""
    payload = dumps_bytes(obj)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if tmp.exists():
            tmp.unlink()
        raise
