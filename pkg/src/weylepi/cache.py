"""Content-addressed on-disk cache with checksummed JSON entries."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

CODE_VERSION = "weylepi-cache-1"


class CacheError(OSError):
    pass


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


class Cache:
    """key = sha256 over (namespace, parts, version tag); value = JSON with a sha256 checksum."""

    def __init__(self, directory: str | os.PathLike, version: str = CODE_VERSION):
        self.dir = Path(directory)
        self.version = version
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CacheError(f"cannot create cache directory {self.dir}: {exc}") from exc
        if not os.access(self.dir, os.W_OK):
            raise CacheError(f"cache directory {self.dir} is not writable")
        self.hits = 0
        self.misses = 0

    def key(self, namespace: str, *parts) -> str:
        return hashlib.sha256(_canonical([namespace, list(parts), self.version])).hexdigest()

    def _path(self, key: str) -> Path:
        return self.dir / key[:2] / f"{key}.json"

    def get(self, key: str):
        path = self._path(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            self.misses += 1
            return None
        try:
            entry = json.loads(raw)
            payload = _canonical(entry["value"])
            if entry.get("key") != key or entry.get("sha256") != hashlib.sha256(payload).hexdigest():
                raise ValueError("checksum mismatch")
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring corrupted cache entry %s (%s)", path, exc)
            self.misses += 1
            return None
        self.hits += 1
        return entry["value"]

    def put(self, key: str, value) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = _canonical(value)
        entry = {"key": key, "sha256": hashlib.sha256(payload).hexdigest(), "value": value}
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(_canonical(entry))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
