"""Ingestion: parse source, chunk, embed, tag ACLs, persist to all stores.

Persist order per document: raw bytes to the blob store, Document + Chunk
records to the metadata store, then delete-old + insert-new vectors under a
per-document lock so a racing search sees either the prior version's chunks
or the new ones, never a mix. Unchanged content short-circuits (skipped).
"""

from __future__ import annotations

import hashlib
import os
import threading
import time
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional
from urllib.parse import urlparse

from ragstack.core import (
    AccessPolicy,
    Chunk,
    Document,
    IngestReport,
    content_digest,
    normalize_text,
    utcnow,
)
from ragstack.errors import (
    EmbeddingUnavailable,
    ModelUnavailable,
    NotFound,
    SourceUnreachable,
    UnsupportedFormat,
)
from ragstack.loader.chunking import ChunkingConfig, chunk_text
from ragstack.model_gateway import ModelClient
from ragstack.storage import BlobStore, MetadataStore
from ragstack.vector_index import VectorIndex

RAW_BUCKET = "raw-sources"

_MD_EXTENSIONS = (".md", ".markdown")
_TXT_EXTENSIONS = (".txt", ".text", ".log")


@dataclass(frozen=True)
class IngestRequest:
    source_uri: str
    acl: AccessPolicy
    declared_format: str = "auto"  # plain_text | markdown | auto
    doc_id: Optional[str] = None
    title: Optional[str] = None


def detect_format(data: bytes, declared: str, source_uri: str = "") -> str:
    if declared in ("plain_text", "markdown"):
        return declared
    if declared != "auto":
        raise UnsupportedFormat(f"unknown declared format: {declared!r}")
    path = urlparse(source_uri).path or source_uri
    ext = os.path.splitext(path)[1].lower()
    if ext in _MD_EXTENSIONS:
        return "markdown"
    if ext in _TXT_EXTENSIONS:
        return "plain_text"
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise UnsupportedFormat("binary content with no declared format") from None
    if text.lstrip().startswith("#") or "\n```" in text:
        return "markdown"
    return "plain_text"


def derive_doc_id(source_uri: str) -> str:
    return hashlib.sha256(source_uri.encode("utf-8")).hexdigest()[:16]


def _title_from(text: str, fmt: str, source_uri: str) -> str:
    if fmt == "markdown":
        for line in text.splitlines():
            if line.startswith("#"):
                return line.lstrip("#").strip()
    name = os.path.basename(urlparse(source_uri).path or source_uri)
    return name or source_uri


def read_source(source_uri: str) -> bytes:
    parsed = urlparse(source_uri)
    if parsed.scheme in ("", "file"):
        path = parsed.path if parsed.scheme == "file" else source_uri
        try:
            with open(path, "rb") as fh:
                return fh.read()
        except OSError as exc:
            raise SourceUnreachable(f"{source_uri}: {exc}") from exc
    raise SourceUnreachable(f"unsupported source scheme: {parsed.scheme!r}")


class Ingestor:
    def __init__(
        self,
        blob_store: BlobStore,
        metadata: MetadataStore,
        index: VectorIndex,
        models: ModelClient,
        chunking: ChunkingConfig = ChunkingConfig(),
    ):
        self.blob_store = blob_store
        self.metadata = metadata
        self.index = index
        self.models = models
        self.chunking = chunking
        self._doc_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def _doc_lock(self, doc_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._doc_locks[doc_id]

    def ingest(self, req: IngestRequest, raw: Optional[bytes] = None) -> IngestReport:
        started = time.monotonic()
        data = read_source(req.source_uri) if raw is None else raw
        fmt = detect_format(data, req.declared_format, req.source_uri)
        text = normalize_text(data)
        digest = content_digest(text)
        doc_id = req.doc_id or derive_doc_id(req.source_uri)

        with self._doc_lock(doc_id):
            prior_version = 0
            try:
                prior = self.metadata.get_record("document", doc_id).payload
                prior_version = prior["version"]
                if prior["content_hash"] == digest:
                    return IngestReport(
                        doc_id=doc_id, version=prior_version,
                        chunk_count=len(self.metadata.query_records(
                            "chunk", {"doc_id": doc_id})),
                        skipped=True,
                        duration_ms=(time.monotonic() - started) * 1000,
                    )
            except NotFound:
                pass

            version = prior_version + 1
            chunks = chunk_text(text, self.chunking, doc_id=doc_id, version=version)
            try:
                embeddings = self.models.embed([c.text for c in chunks])
            except ModelUnavailable as exc:
                raise EmbeddingUnavailable(str(exc)) from exc

            document = Document(
                doc_id=doc_id,
                source_uri=req.source_uri,
                title=req.title or _title_from(text, fmt, req.source_uri),
                content_hash=digest,
                version=version,
                acl=req.acl,
                ingested_at=utcnow(),
            )
            self.blob_store.put_object(RAW_BUCKET, f"{doc_id}/v{version}", data)
            for old in self.metadata.query_records("chunk", {"doc_id": doc_id}):
                self.metadata.delete_record("chunk", old.key)
            self.metadata.upsert_record("document", doc_id, document.to_json())
            for chunk in chunks:
                self.metadata.upsert_record("chunk", chunk.chunk_id, chunk.to_json())
            # single-snapshot swap: a racing search sees old or new, never a mix
            self.index.replace_document(
                doc_id,
                [(chunk.chunk_id, vector, req.acl)
                 for chunk, vector in zip(chunks, embeddings.vectors)],
            )

            report = IngestReport(
                doc_id=doc_id, version=version, chunk_count=len(chunks),
                skipped=False, duration_ms=(time.monotonic() - started) * 1000,
            )
            self.metadata.upsert_record("ingest_report", f"{doc_id}:{version}",
                                        report.to_json())
            return report

    def get_document(self, doc_id: str) -> dict:
        return self.metadata.get_record("document", doc_id).payload

    def get_chunks(self, doc_id: str) -> list[dict]:
        records = self.metadata.query_records("chunk", {"doc_id": doc_id})
        return sorted((r.payload for r in records), key=lambda p: p["seq"])
