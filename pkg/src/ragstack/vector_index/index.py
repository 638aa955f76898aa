"""Exact exhaustive vector index with ACL-filtered top-k cosine search.

Each vector carries a denormalized ACL snapshot so search never touches the
metadata store; vectors the principal cannot read are filtered before
ranking. Exhaustive scan keeps results exactly equal to the filter-first
oracle; approximate structures are deliberately out of scope.
"""

from __future__ import annotations

import json
import struct
import threading
from dataclasses import dataclass

import numpy as np

from ragstack.auth.policy import authorize_read
from ragstack.core import AccessPolicy, Principal
from ragstack.errors import DimensionMismatch, NonFiniteEntry, ZeroVector

_SNAPSHOT_MAGIC = b"RGVX"


@dataclass(frozen=True)
class SearchHit:
    chunk_id: str
    doc_id: str
    score: float
    rank: int


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| |b|), clamped into [-1, 1]."""
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise DimensionMismatch(f"{av.shape} vs {bv.shape}")
    na = float(np.linalg.norm(av))
    nb = float(np.linalg.norm(bv))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine undefined for zero vector")
    return float(np.clip(float(np.dot(av, bv)) / (na * nb), -1.0, 1.0))


class VectorIndex:
    """In-memory exhaustive index. Writes are serialized; searches run on an
    atomically swapped snapshot, so a concurrent search sees either the pre-
    or post-write state, never a partial one."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise DimensionMismatch("dimension must be >= 1")
        self.dimension = dimension
        self._write_lock = threading.Lock()
        # snapshot state, swapped wholesale under the write lock
        self._entries: dict[str, tuple[str, np.ndarray, float, AccessPolicy]] = {}
        self._matrix_cache: tuple | None = None  # (entries_ref, ids, matrix, norms)

    def __len__(self) -> int:
        return len(self._entries)

    def _validate(self, vector) -> np.ndarray:
        v = np.asarray(vector, dtype=np.float64)
        if v.ndim != 1 or v.shape[0] != self.dimension:
            raise DimensionMismatch(
                f"expected dimension {self.dimension}, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteEntry("vector contains non-finite entries")
        if float(np.linalg.norm(v)) == 0.0:
            raise ZeroVector("zero vectors are not indexable")
        return v

    def upsert(self, chunk_id: str, doc_id: str, vector, acl: AccessPolicy) -> None:
        v = self._validate(vector)
        norm = float(np.linalg.norm(v))
        with self._write_lock:
            entries = dict(self._entries)
            entries[chunk_id] = (doc_id, v, norm, acl)
            self._entries = entries
            self._matrix_cache = None

    def replace_document(self, doc_id: str,
                         items: list[tuple[str, object, AccessPolicy]]) -> int:
        """Atomically swap all vectors of one document: removes every vector
        with this doc_id and inserts the given (chunk_id, vector, acl) set in
        a single snapshot publication. Returns the count removed."""
        validated = [(cid, self._validate(vec)) for cid, vec, _acl in items]
        with self._write_lock:
            entries = {cid: e for cid, e in self._entries.items() if e[0] != doc_id}
            removed = len(self._entries) - len(entries)
            for (cid, v), (_cid, _vec, acl) in zip(validated, items):
                entries[cid] = (doc_id, v, float(np.linalg.norm(v)), acl)
            self._entries = entries
            self._matrix_cache = None
        return removed

    def delete_by_document(self, doc_id: str) -> int:
        with self._write_lock:
            entries = {cid: e for cid, e in self._entries.items() if e[0] != doc_id}
            removed = len(self._entries) - len(entries)
            if removed:
                self._entries = entries
                self._matrix_cache = None
        return removed

    def _snapshot(self):
        entries = self._entries
        cache = self._matrix_cache
        if cache is None or cache[0] is not entries:
            ids = sorted(entries)
            if ids:
                matrix = np.stack([entries[cid][1] for cid in ids])
                norms = np.array([entries[cid][2] for cid in ids])
            else:
                matrix = np.zeros((0, self.dimension))
                norms = np.zeros(0)
            cache = (entries, ids, matrix, norms)
            self._matrix_cache = cache
        return entries, cache[1:]

    def search(self, query, k: int, principal: Principal) -> list[SearchHit]:
        if k < 1:
            raise ValueError("k must be >= 1")
        q = self._validate(query)
        qnorm = float(np.linalg.norm(q))
        entries, (ids, matrix, norms) = self._snapshot()
        if not ids:
            return []
        authorized = np.array(
            [authorize_read(principal, entries[cid][3]) for cid in ids], dtype=bool)
        if not authorized.any():
            return []
        scores = np.clip((matrix @ q) / (norms * qnorm), -1.0, 1.0)
        idx = np.flatnonzero(authorized)
        # sort by score desc, chunk_id asc; ids is already sorted ascending
        order = idx[np.argsort(-scores[idx], kind="stable")][:k]
        return [
            SearchHit(chunk_id=ids[i], doc_id=entries[ids[i]][0],
                      score=float(scores[i]), rank=rank)
            for rank, i in enumerate(order, start=1)
        ]

    # -- on-disk snapshot ---------------------------------------------------

    def save_snapshot(self, path: str) -> None:
        entries, (ids, _m, _n) = self._snapshot()
        with open(path, "wb") as fh:
            fh.write(_SNAPSHOT_MAGIC)
            fh.write(struct.pack("<II", self.dimension, len(ids)))
            for cid in ids:
                doc_id, v, _norm, acl = entries[cid]
                for field in (cid.encode(), doc_id.encode(),
                              json.dumps(acl.to_json()).encode()):
                    fh.write(struct.pack("<I", len(field)))
                    fh.write(field)
                fh.write(v.astype("<f4").tobytes())

    @classmethod
    def load_snapshot(cls, path: str) -> "VectorIndex":
        with open(path, "rb") as fh:
            if fh.read(4) != _SNAPSHOT_MAGIC:
                raise ValueError("not a vector index snapshot")
            dimension, count = struct.unpack("<II", fh.read(8))
            index = cls(dimension)
            for _ in range(count):
                fields = []
                for _f in range(3):
                    (length,) = struct.unpack("<I", fh.read(4))
                    fields.append(fh.read(length))
                vec = np.frombuffer(fh.read(4 * dimension), dtype="<f4").astype(np.float64)
                index.upsert(fields[0].decode(), fields[1].decode(), vec,
                             AccessPolicy.from_json(json.loads(fields[2])))
        return index
