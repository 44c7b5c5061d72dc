from __future__ import annotations

import json
import logging
import os

import pytest

from weylepi.cache import Cache, CacheError


def test_put_get_round_trip(tmp_path):
    c = Cache(tmp_path)
    key = c.key("invariant_basis", "sl-n2-p3", 12)
    value = [[[0, 1], 0, 2], [[3, 0], 1, 1]]
    assert c.get(key) is None
    c.put(key, value)
    assert c.get(key) == value
    raw = next(tmp_path.rglob("*.json")).read_bytes()
    c.put(key, value)
    assert next(tmp_path.rglob("*.json")).read_bytes() == raw
    assert (c.hits, c.misses) == (1, 1)


def test_version_tag_changes_key(tmp_path):
    a, b = Cache(tmp_path, version="v1"), Cache(tmp_path, version="v2")
    a.put(a.key("x", 1), 5)
    assert b.get(b.key("x", 1)) is None
    assert a.key("x", 1) != a.key("x", 2)


def test_corrupted_entry_is_a_miss_with_warning(tmp_path, caplog):
    c = Cache(tmp_path)
    key = c.key("x", 1)
    c.put(key, {"dims": [1, 2, 3]})
    path = next(tmp_path.rglob("*.json"))
    entry = json.loads(path.read_text())
    entry["value"]["dims"][0] = 9
    path.write_text(json.dumps(entry))
    with caplog.at_level(logging.WARNING):
        assert c.get(key) is None
    assert "corrupted" in caplog.text
    path.write_text("{not json")
    assert c.get(key) is None


def test_no_temp_files_left_behind(tmp_path):
    c = Cache(tmp_path)
    for i in range(5):
        c.put(c.key("x", i), list(range(i)))
    assert not list(tmp_path.rglob("*.tmp"))


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_unwritable_directory(tmp_path):
    d = tmp_path / "ro"
    d.mkdir()
    d.chmod(0o500)
    try:
        with pytest.raises(CacheError):
            Cache(d)
    finally:
        d.chmod(0o700)


def test_cache_path_that_is_a_file(tmp_path):
    f = tmp_path / "file"
    f.write_text("")
    with pytest.raises(CacheError):
        Cache(f)
