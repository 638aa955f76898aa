"""Shared domain types exchanged between services.

All types are immutable value objects; their canonical wire form is the
JSON produced by ``to_json`` with field names exactly as declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Optional


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _ts(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _parse_ts(s: str) -> datetime:
    return datetime.fromisoformat(s.replace("Z", "+00:00"))


@dataclass(frozen=True)
class AccessPolicy:
    """Per-document read policy. Empty policy denies everyone (fail-closed)."""

    allowed_groups: frozenset[str] = frozenset()
    allowed_users: frozenset[str] = frozenset()
    public: bool = False

    def to_json(self) -> dict[str, Any]:
        return {
            "allowed_groups": sorted(self.allowed_groups),
            "allowed_users": sorted(self.allowed_users),
            "public": self.public,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "AccessPolicy":
        return cls(
            allowed_groups=frozenset(d.get("allowed_groups", [])),
            allowed_users=frozenset(d.get("allowed_users", [])),
            public=bool(d.get("public", False)),
        )


@dataclass(frozen=True)
class Principal:
    user_id: str
    groups: frozenset[str]
    session_expiry: datetime

    def to_json(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "groups": sorted(self.groups),
            "session_expiry": _ts(self.session_expiry),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Principal":
        return cls(
            user_id=d["user_id"],
            groups=frozenset(d["groups"]),
            session_expiry=_parse_ts(d["session_expiry"]),
        )


@dataclass(frozen=True)
class Document:
    doc_id: str
    source_uri: str
    title: str
    content_hash: str
    version: int
    acl: AccessPolicy
    ingested_at: datetime

    def to_json(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "source_uri": self.source_uri,
            "title": self.title,
            "content_hash": self.content_hash,
            "version": self.version,
            "acl": self.acl.to_json(),
            "ingested_at": _ts(self.ingested_at),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Document":
        return cls(
            doc_id=d["doc_id"],
            source_uri=d["source_uri"],
            title=d["title"],
            content_hash=d["content_hash"],
            version=int(d["version"]),
            acl=AccessPolicy.from_json(d["acl"]),
            ingested_at=_parse_ts(d["ingested_at"]),
        )


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    seq: int
    text: str
    token_count: int
    char_span: tuple[int, int]  # [start, end) into normalized document text
    embedding_ref: Optional[str] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "seq": self.seq,
            "text": self.text,
            "token_count": self.token_count,
            "char_span": list(self.char_span),
            "embedding_ref": self.embedding_ref,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Chunk":
        return cls(
            chunk_id=d["chunk_id"],
            doc_id=d["doc_id"],
            seq=int(d["seq"]),
            text=d["text"],
            token_count=int(d["token_count"]),
            char_span=(int(d["char_span"][0]), int(d["char_span"][1])),
            embedding_ref=d.get("embedding_ref"),
        )


@dataclass(frozen=True)
class Citation:
    chunk_id: str
    doc_id: str
    relevance_score: float

    def to_json(self) -> dict[str, Any]:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "relevance_score": self.relevance_score,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Citation":
        return cls(d["chunk_id"], d["doc_id"], float(d["relevance_score"]))


@dataclass(frozen=True)
class Verdict:
    """Answer verification result. decision follows the threshold mapping:
    pass iff grounded_score >= pass_threshold, block iff < block_threshold,
    flag otherwise."""

    grounded_score: float
    unsupported_sentences: tuple[int, ...]
    decision: str  # pass | flag | block
    method: str  # lexical | llm

    def to_json(self) -> dict[str, Any]:
        return {
            "grounded_score": self.grounded_score,
            "unsupported_sentences": list(self.unsupported_sentences),
            "decision": self.decision,
            "method": self.method,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Verdict":
        return cls(
            grounded_score=float(d["grounded_score"]),
            unsupported_sentences=tuple(d["unsupported_sentences"]),
            decision=d["decision"],
            method=d["method"],
        )


@dataclass(frozen=True)
class Answer:
    text: str
    citations: tuple[Citation, ...]
    verification: Optional[Verdict]
    trace_id: str
    stage_profile: tuple[str, ...]
    refusal: bool = False
    refusal_reason: Optional[str] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "citations": [c.to_json() for c in self.citations],
            "verification": self.verification.to_json() if self.verification else None,
            "trace_id": self.trace_id,
            "stage_profile": list(self.stage_profile),
            "refusal": self.refusal,
            "refusal_reason": self.refusal_reason,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Answer":
        return cls(
            text=d["text"],
            citations=tuple(Citation.from_json(c) for c in d["citations"]),
            verification=Verdict.from_json(d["verification"]) if d.get("verification") else None,
            trace_id=d["trace_id"],
            stage_profile=tuple(d["stage_profile"]),
            refusal=bool(d.get("refusal", False)),
            refusal_reason=d.get("refusal_reason"),
        )


@dataclass(frozen=True)
class IngestReport:
    doc_id: str
    version: int
    chunk_count: int
    skipped: bool
    duration_ms: float
    failures: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "version": self.version,
            "chunk_count": self.chunk_count,
            "skipped": self.skipped,
            "duration_ms": self.duration_ms,
            "failures": list(self.failures),
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "IngestReport":
        return cls(
            doc_id=d["doc_id"],
            version=int(d["version"]),
            chunk_count=int(d["chunk_count"]),
            skipped=bool(d["skipped"]),
            duration_ms=float(d["duration_ms"]),
            failures=tuple(d.get("failures", [])),
        )
