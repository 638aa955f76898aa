"""Metadata store: single-file embedded record store with in-memory index.

Records are (record_type, key) -> canonical JSON payload, validated against
the published schemas on write. Persistence is an append-on-save JSON file;
read-your-writes holds trivially since the index is in-process and guarded
by a lock. Substitutable with a real database behind the same interface.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from typing import Any, Optional

import jsonschema

from ragstack.core import utcnow
from ragstack.core.schemas import RECORD_SCHEMAS
from ragstack.errors import NotFound, SchemaViolation

_VALIDATORS = {
    rtype: jsonschema.Draft202012Validator(schema)
    for rtype, schema in RECORD_SCHEMAS.items()
}


@dataclass(frozen=True)
class MetadataRecord:
    record_type: str
    key: str
    payload: dict[str, Any]
    updated_at: str


class MetadataStore:
    def __init__(self, path: Optional[str] = None):
        self._path = path
        self._lock = threading.RLock()
        self._records: dict[tuple[str, str], MetadataRecord] = {}
        if path and os.path.exists(path):
            self._load()

    def _load(self) -> None:
        with open(self._path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                rec = MetadataRecord(raw["record_type"], raw["key"], raw["payload"],
                                     raw["updated_at"])
                self._records[(rec.record_type, rec.key)] = rec

    def _save(self) -> None:
        if not self._path:
            return
        os.makedirs(os.path.dirname(self._path) or ".", exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(self._path) or ".",
                                   prefix=".meta-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for rec in self._records.values():
                fh.write(json.dumps({
                    "record_type": rec.record_type,
                    "key": rec.key,
                    "payload": rec.payload,
                    "updated_at": rec.updated_at,
                }) + "\n")
        os.replace(tmp, self._path)

    def upsert_record(self, record_type: str, key: str, payload: dict[str, Any]) -> MetadataRecord:
        validator = _VALIDATORS.get(record_type)
        if validator is None:
            raise SchemaViolation(f"unknown record_type: {record_type!r}")
        errors = sorted(validator.iter_errors(payload), key=str)
        if errors:
            raise SchemaViolation(f"{record_type} payload invalid: {errors[0].message}")
        rec = MetadataRecord(record_type, key, payload, utcnow().isoformat())
        with self._lock:
            self._records[(record_type, key)] = rec
            self._save()
        return rec

    def get_record(self, record_type: str, key: str) -> MetadataRecord:
        with self._lock:
            rec = self._records.get((record_type, key))
        if rec is None:
            raise NotFound(f"{record_type}/{key}")
        return rec

    def delete_record(self, record_type: str, key: str) -> bool:
        with self._lock:
            existed = self._records.pop((record_type, key), None) is not None
            if existed:
                self._save()
        return existed

    def query_records(self, record_type: str,
                      filter: Optional[dict[str, Any]] = None) -> list[MetadataRecord]:
        """All records of a type matching equality filters on payload fields."""
        filter = filter or {}
        with self._lock:
            out = [
                rec for (rtype, _k), rec in self._records.items()
                if rtype == record_type
                and all(rec.payload.get(f) == v for f, v in filter.items())
            ]
        out.sort(key=lambda r: r.key)
        return out
