"""Deterministic mock model: embedding formula and template generation.

These are pure functions so the whole stack can run and be tested without
any real model. The embedding formula: seed a counter-based generator with
the SHA-256 of the text, draw d uniform values in [-1, 1] scaled by a small
noise amplitude, add +0.5 at coordinate (h mod d) for each distinct
word-token hash h (topical overlap then raises cosine similarity), and
normalize to unit length. The amplitude keeps the word boosts dominant over
the per-text noise so overlapping texts reliably score higher.
"""

from __future__ import annotations

import hashlib
import re

MOCK_MARKER = "[MOCK]"
NO_CONTEXT_COMPLETION = "[MOCK] no context provided"
MOCK_MODEL_ID = "mock-1"

# context block markers, shared with the prompt builder
CTX_OPEN_RE = re.compile(r"\[CTX chunk_id=([^ \]]+) title=([^\]]*)\]\n", re.DOTALL)
CTX_BLOCK_RE = re.compile(
    r"\[CTX chunk_id=(?P<chunk_id>[^ \]]+) title=(?P<title>[^\]]*)\]\n"
    r"(?P<body>.*?)\n\[/CTX\]",
    re.DOTALL,
)

_SENTENCE_END_RE = re.compile(r"[.!?](?=\s|$)")

NOISE_AMPLITUDE = 0.1
WORD_BOOST = 0.5


def _u64(data: bytes) -> int:
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "big")


def mock_embedding(text: str, d: int) -> list[float]:
    if d < 8:
        raise ValueError("dimension must be >= 8")
    seed = hashlib.sha256(text.encode("utf-8")).digest()
    vec = [((_u64(seed + i.to_bytes(8, "little")) / 2**63) - 1.0) * NOISE_AMPLITUDE
           for i in range(d)]
    for word in set(text.split()):
        h = _u64(word.encode("utf-8"))
        vec[h % d] += WORD_BOOST
    norm = sum(x * x for x in vec) ** 0.5
    if norm == 0.0:
        vec[0] = 1.0
        norm = 1.0
    return [x / norm for x in vec]


def first_sentence(text: str) -> str:
    text = text.strip()
    m = _SENTENCE_END_RE.search(text)
    return text[: m.end()] if m else text


def mock_generate(prompt: str, max_tokens: int, stop: list[str] | None = None) -> tuple[str, str]:
    """Deterministic completion; returns (text, finish_reason).

    Echoes the first sentence of each [CTX]-delimited block in prompt order.
    Token-equivalent unit for max_tokens truncation is a whitespace word.
    """
    blocks = [m.group("body") for m in CTX_BLOCK_RE.finditer(prompt)]
    sentences = [first_sentence(b) for b in blocks if b.strip()]
    if sentences:
        text = f"{MOCK_MARKER} Based on the provided context: " + " ".join(sentences)
    else:
        text = NO_CONTEXT_COMPLETION

    finish_reason = "stop"
    for s in stop or []:
        if s and s in text:
            text = text[: text.index(s)]
    words = text.split()
    if len(words) > max_tokens:
        text = " ".join(words[:max_tokens])
        finish_reason = "length"
    return text, finish_reason
