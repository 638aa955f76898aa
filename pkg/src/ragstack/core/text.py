"""Pure text operations: normalization, token estimation, chunk identifiers.

All downstream chunk spans are offsets into the *normalized* text, so the
normalization rules here are fixed and deterministic; changing them changes
every chunk identifier in the system.
"""

from __future__ import annotations

import hashlib
import re

from ragstack.errors import DecodeError

_HWS_RE = re.compile(r"[ \t\f\v]+")
_BLANK_RUN_RE = re.compile(r"\n{3,}")
_FENCE_RE = re.compile(r"^\s*```")

# words per token budget: tokens = ceil(words * 4 / 3)
_TOKENS_PER_WORD_NUM = 4
_TOKENS_PER_WORD_DEN = 3


def normalize_text(raw: bytes | str) -> str:
    """Normalize raw document bytes to canonical text.

    Rules: strip UTF-8 BOM, normalize CRLF/CR to LF, collapse runs of
    horizontal whitespace outside code fences to a single space, strip
    trailing spaces, and collapse runs of 3+ newlines to a paragraph break.
    Content inside ``` fences is preserved verbatim (fence state toggles per
    fence line). Idempotent by construction.
    """
    if isinstance(raw, bytes):
        if raw.startswith(b"\xef\xbb\xbf"):
            raw = raw[3:]
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"input is not valid UTF-8: {exc}") from exc
    else:
        text = raw.lstrip("﻿")

    text = text.replace("\r\n", "\n").replace("\r", "\n")

    out_lines: list[str] = []
    in_fence = False
    for line in text.split("\n"):
        if _FENCE_RE.match(line):
            in_fence = not in_fence
            out_lines.append(line.rstrip())
            continue
        if in_fence:
            out_lines.append(line)
        else:
            out_lines.append(_HWS_RE.sub(" ", line).rstrip())
    result = "\n".join(out_lines)
    if not in_fence:
        result = _BLANK_RUN_RE.sub("\n\n", result)
    return result


def estimate_tokens(text: str) -> int:
    """Token estimate: ceil(whitespace-delimited word count * 4/3).

    A stated approximation; real deployments may substitute a model
    tokenizer behind this operation.
    """
    words = len(text.split())
    return -(-words * _TOKENS_PER_WORD_NUM // _TOKENS_PER_WORD_DEN)


def max_words_for_tokens(max_tokens: int) -> int:
    """Largest word count whose token estimate stays within max_tokens."""
    return max_tokens * _TOKENS_PER_WORD_DEN // _TOKENS_PER_WORD_NUM


def content_digest(text: str) -> str:
    """Hex digest of normalized content (32 bytes, 64 hex chars)."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def chunk_identifier(doc_id: str, version: int, seq: int) -> str:
    """Stable chunk id derived from (doc_id, version, seq).

    128-bit truncated SHA-256; a collision is treated as fatal by callers.
    """
    if seq < 0:
        raise ValueError("seq must be >= 0")
    if version < 1:
        raise ValueError("version must be >= 1")
    material = f"{doc_id}\x00{version}\x00{seq}".encode("utf-8")
    return hashlib.sha256(material).hexdigest()[:32]
