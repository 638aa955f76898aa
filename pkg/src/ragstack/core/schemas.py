"""Published JSON schemas for the canonical wire types.

The metadata store validates record payloads against these, and the gateway
serves them under /v1/schema.
"""

from __future__ import annotations

ACCESS_POLICY = {
    "type": "object",
    "required": ["allowed_groups", "allowed_users", "public"],
    "additionalProperties": False,
    "properties": {
        "allowed_groups": {"type": "array", "items": {"type": "string"}},
        "allowed_users": {"type": "array", "items": {"type": "string"}},
        "public": {"type": "boolean"},
    },
}

DOCUMENT = {
    "type": "object",
    "required": ["doc_id", "source_uri", "title", "content_hash", "version", "acl", "ingested_at"],
    "additionalProperties": False,
    "properties": {
        "doc_id": {"type": "string", "minLength": 1},
        "source_uri": {"type": "string"},
        "title": {"type": "string"},
        "content_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "version": {"type": "integer", "minimum": 1},
        "acl": ACCESS_POLICY,
        "ingested_at": {"type": "string"},
    },
}

CHUNK = {
    "type": "object",
    "required": ["chunk_id", "doc_id", "seq", "text", "token_count", "char_span"],
    "additionalProperties": False,
    "properties": {
        "chunk_id": {"type": "string", "minLength": 1},
        "doc_id": {"type": "string", "minLength": 1},
        "seq": {"type": "integer", "minimum": 0},
        "text": {"type": "string"},
        "token_count": {"type": "integer", "minimum": 1},
        "char_span": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
        "embedding_ref": {"type": ["string", "null"]},
    },
}

INGEST_REPORT = {
    "type": "object",
    "required": ["doc_id", "version", "chunk_count", "skipped", "duration_ms"],
    "additionalProperties": False,
    "properties": {
        "doc_id": {"type": "string"},
        "version": {"type": "integer", "minimum": 1},
        "chunk_count": {"type": "integer", "minimum": 0},
        "skipped": {"type": "boolean"},
        "duration_ms": {"type": "number", "minimum": 0},
        "failures": {"type": "array", "items": {"type": "string"}},
    },
}

VERDICT = {
    "type": "object",
    "required": ["grounded_score", "unsupported_sentences", "decision", "method"],
    "additionalProperties": False,
    "properties": {
        "grounded_score": {"type": "number", "minimum": 0, "maximum": 1},
        "unsupported_sentences": {"type": "array", "items": {"type": "integer"}},
        "decision": {"enum": ["pass", "flag", "block"]},
        "method": {"enum": ["lexical", "llm"]},
    },
}

CITATION = {
    "type": "object",
    "required": ["chunk_id", "doc_id", "relevance_score"],
    "additionalProperties": False,
    "properties": {
        "chunk_id": {"type": "string"},
        "doc_id": {"type": "string"},
        "relevance_score": {"type": "number"},
    },
}

ANSWER = {
    "type": "object",
    "required": ["text", "citations", "verification", "trace_id", "stage_profile", "refusal"],
    "additionalProperties": False,
    "properties": {
        "text": {"type": "string"},
        "citations": {"type": "array", "items": CITATION},
        "verification": {"anyOf": [VERDICT, {"type": "null"}]},
        "trace_id": {"type": "string"},
        "stage_profile": {"type": "array", "items": {"type": "string"}},
        "refusal": {"type": "boolean"},
        "refusal_reason": {"type": ["string", "null"]},
    },
}

API_ERROR = {
    "type": "object",
    "required": ["code", "message", "trace_id", "http_status"],
    "additionalProperties": False,
    "properties": {
        "code": {"type": "string"},
        "message": {"type": "string"},
        "trace_id": {"type": "string"},
        "http_status": {"type": "integer"},
    },
}

RECORD_SCHEMAS = {
    "document": DOCUMENT,
    "chunk": CHUNK,
    "ingest_report": INGEST_REPORT,
}

ALL_SCHEMAS = {
    "access_policy": ACCESS_POLICY,
    "document": DOCUMENT,
    "chunk": CHUNK,
    "ingest_report": INGEST_REPORT,
    "verdict": VERDICT,
    "citation": CITATION,
    "answer": ANSWER,
    "api_error": API_ERROR,
}
