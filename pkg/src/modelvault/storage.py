"""On-disk vault layout and crash-safe file IO.

Layout under the vault root (all metadata is canonical JSON, models are
exchange XML)::

    config.meta
    users
    notifications.meta
    entries/<entry-id>/master.meta
    entries/<entry-id>/variants/<variant>/variant.meta
    entries/<entry-id>/variants/<variant>/versions/<n>/meta
    entries/<entry-id>/variants/<variant>/versions/<n>/model.xml
    index/postings.meta        (derived, rebuildable)

Writes go to a temp file in the target directory, are fsynced, then renamed
over the destination, so readers and crashed writers never observe partial
files. Serialization is canonical (sorted keys, two-space indent) so a
loaded vault re-serializes to identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .errors import StorageError

MASTER_FILE = "master.meta"
VARIANT_FILE = "variant.meta"
VERSION_FILE = "meta"
MODEL_FILE = "model.xml"
USERS_FILE = "users"
CONFIG_FILE = "config.meta"
NOTIFICATIONS_FILE = "notifications.meta"
INDEX_DIR = "index"
POSTINGS_FILE = "postings.meta"


def dumps(data: Any) -> bytes:
    return (json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


def read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise StorageError(f"missing file: {path}") from None
    except OSError as exc:
        raise StorageError(f"unreadable file: {path} ({exc})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StorageError(f"corrupt metadata file: {path} ({exc})") from exc


def read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise StorageError(f"missing file: {path}") from None
    except OSError as exc:
        raise StorageError(f"unreadable file: {path} ({exc})") from exc


def atomic_write(path: Path, data: bytes) -> None:
    """Durably write *data* to *path* via temp-file-then-rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except OSError as exc:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise StorageError(f"write failed: {path} ({exc})") from exc


# -- path builders -----------------------------------------------------------


def entries_dir(root: Path) -> Path:
    return root / "entries"


def entry_dir(root: Path, entry_id: str) -> Path:
    return entries_dir(root) / entry_id


def master_path(root: Path, entry_id: str) -> Path:
    return entry_dir(root, entry_id) / MASTER_FILE


def variant_dir(root: Path, entry_id: str, variant_id: str) -> Path:
    return entry_dir(root, entry_id) / "variants" / variant_id


def variant_meta_path(root: Path, entry_id: str, variant_id: str) -> Path:
    return variant_dir(root, entry_id, variant_id) / VARIANT_FILE


def version_dir(root: Path, entry_id: str, variant_id: str, number: int) -> Path:
    return variant_dir(root, entry_id, variant_id) / "versions" / str(number)


def version_meta_path(root: Path, entry_id: str, variant_id: str, number: int) -> Path:
    return version_dir(root, entry_id, variant_id, number) / VERSION_FILE


def model_path(root: Path, entry_id: str, variant_id: str, number: int) -> Path:
    return version_dir(root, entry_id, variant_id, number) / MODEL_FILE


def users_path(root: Path) -> Path:
    return root / USERS_FILE


def config_path(root: Path) -> Path:
    return root / CONFIG_FILE


def notifications_path(root: Path) -> Path:
    return root / NOTIFICATIONS_FILE


def postings_path(root: Path) -> Path:
    return root / INDEX_DIR / POSTINGS_FILE


# -- directory walking -------------------------------------------------------


def list_entry_ids(root: Path) -> list[str]:
    base = entries_dir(root)
    if not base.is_dir():
        return []
    return sorted(p.name for p in base.iterdir() if p.is_dir())


def list_variant_ids(root: Path, entry_id: str) -> list[str]:
    base = entry_dir(root, entry_id) / "variants"
    if not base.is_dir():
        return []
    return sorted(p.name for p in base.iterdir() if p.is_dir())


def list_version_numbers(root: Path, entry_id: str, variant_id: str) -> list[int]:
    base = variant_dir(root, entry_id, variant_id) / "versions"
    if not base.is_dir():
        return []
    numbers = []
    for p in base.iterdir():
        if p.is_dir() and p.name.isdigit():
            numbers.append(int(p.name))
    return sorted(numbers)
