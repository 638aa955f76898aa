"""Deterministic chunking of normalized text into overlapping spans.

Chunks tile the document: chunk i+1 starts ``overlap`` words before chunk
i ends (or exactly at its span end when overlap is zero), so stripping each
chunk's overlap region and concatenating reproduces the normalized text
byte-exactly. Boundaries prefer paragraph breaks, then sentence ends, then
hard cuts at the token budget.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ragstack.core import Chunk, chunk_identifier, estimate_tokens, max_words_for_tokens
from ragstack.errors import EmptyDocument

_WORD_RE = re.compile(r"\S+")
_SENT_END_RE = re.compile(r"[.!?][\"')\]]*$")


@dataclass(frozen=True)
class ChunkingConfig:
    max_chunk_tokens: int = 320
    overlap_tokens: int = 48
    boundary_preference: str = "paragraph"  # paragraph | sentence | hard

    def __post_init__(self):
        if self.max_chunk_tokens < 1:
            raise ValueError("max_chunk_tokens must be positive")
        if not 0 <= self.overlap_tokens < self.max_chunk_tokens:
            raise ValueError("overlap_tokens must be in [0, max_chunk_tokens)")
        if self.boundary_preference not in ("paragraph", "sentence", "hard"):
            raise ValueError(f"unknown boundary_preference: {self.boundary_preference}")


def chunk_text(text: str, cfg: ChunkingConfig, doc_id: str = "doc",
               version: int = 1) -> list[Chunk]:
    if not text.strip():
        raise EmptyDocument("document is empty after normalization")

    words = list(_WORD_RE.finditer(text))
    n = len(words)
    max_words = max(1, max_words_for_tokens(cfg.max_chunk_tokens))
    overlap_words = max_words_for_tokens(cfg.overlap_tokens)

    def paragraph_break_after(i: int) -> bool:
        # paragraph break in the gap between word i and word i+1
        gap = text[words[i].end(): words[i + 1].start()] if i + 1 < n else ""
        return "\n\n" in gap

    def sentence_end_at(i: int) -> bool:
        return bool(_SENT_END_RE.search(words[i].group()))

    def pick_end(start: int) -> int:
        """End word index (exclusive) for a chunk starting at word `start`."""
        hard_end = min(start + max_words, n)
        if hard_end == n:
            return n
        window = range(hard_end, start, -1)  # latest boundary wins
        if cfg.boundary_preference == "paragraph":
            for i in window:
                if paragraph_break_after(i - 1):
                    return i
        if cfg.boundary_preference in ("paragraph", "sentence"):
            for i in window:
                if sentence_end_at(i - 1):
                    return i
        return hard_end

    chunks: list[Chunk] = []
    start_word = 0
    span_start = 0
    seq = 0
    while True:
        end_word = pick_end(start_word)
        at_end = end_word == n
        span_end = len(text) if at_end else words[end_word - 1].end()
        chunk_body = text[span_start:span_end]
        chunks.append(Chunk(
            chunk_id=chunk_identifier(doc_id, version, seq),
            doc_id=doc_id,
            seq=seq,
            text=chunk_body,
            token_count=estimate_tokens(chunk_body),
            char_span=(span_start, span_end),
        ))
        if at_end:
            return chunks
        next_start = max(end_word - overlap_words, start_word + 1)
        span_start = span_end if next_start >= end_word else words[next_start].start()
        start_word = next_start
        seq += 1


def strip_overlap_and_join(chunks: list[Chunk], text_len: int | None = None) -> str:
    """Reconstruct the original text: first chunk whole, then each chunk
    minus the part that overlaps its predecessor's span."""
    out = []
    prev_end = 0
    for c in chunks:
        start, end = c.char_span
        cut = max(prev_end - start, 0)
        out.append(c.text[cut:])
        prev_end = end
    return "".join(out)
