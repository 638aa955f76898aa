"""Answer verification: per-sentence groundedness against retrieved chunks.

Lexical method: a sentence is supported when the fraction of its content
words found in any *single* chunk reaches the overlap threshold;
grounded_score is the supported fraction over all sentences. An optional
LLM judge replaces the per-sentence test with the same aggregation and
falls back to lexical when unavailable.
"""

from __future__ import annotations

import re
from typing import Callable, Optional

from ragstack.core import Verdict
from ragstack.errors import JudgeUnavailable

DEFAULT_OVERLAP_THRESHOLD = 0.6
DEFAULT_PASS_THRESHOLD = 0.8
DEFAULT_BLOCK_THRESHOLD = 0.3

ABBREVIATIONS = {"mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc",
                 "e.g", "i.e", "fig", "no", "vol", "approx"}

STOPWORDS = {
    "a", "an", "the", "and", "or", "but", "if", "then", "is", "are", "was",
    "were", "be", "been", "being", "to", "of", "in", "on", "at", "by", "for",
    "with", "from", "as", "it", "its", "this", "that", "these", "those", "has",
    "have", "had", "do", "does", "did", "not", "no", "so", "such", "can",
    "could", "will", "would", "should", "may", "might", "must", "about",
    "into", "over", "under", "than", "too", "very", "which", "who", "whom",
    "what", "when", "where", "how", "why", "there", "here", "also",
}

_WORD_RE = re.compile(r"[A-Za-z0-9']+")
_SENT_BOUNDARY_RE = re.compile(r"([.!?])\s+(?=[A-Z0-9\"'(\[])")


def split_sentences(text: str) -> list[str]:
    """Terminator followed by whitespace and an uppercase/digit start, with
    an abbreviation exception list. Documented so oracles can replicate it."""
    text = text.strip()
    if not text:
        return []
    sentences: list[str] = []
    start = 0
    for m in _SENT_BOUNDARY_RE.finditer(text):
        candidate = text[start:m.end(1)]
        last_word = candidate.rstrip(".!?").rsplit(None, 1)[-1].lower() if candidate.strip() else ""
        if last_word in ABBREVIATIONS or last_word.rstrip(".") in ABBREVIATIONS:
            continue
        sentences.append(candidate.strip())
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def content_words(text: str) -> set[str]:
    return {w.lower() for w in _WORD_RE.findall(text)} - STOPWORDS


def _decision(score: float, pass_threshold: float, block_threshold: float) -> str:
    if score >= pass_threshold:
        return "pass"
    if score < block_threshold:
        return "block"
    return "flag"


class AnswerVerifier:
    def __init__(
        self,
        overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
        pass_threshold: float = DEFAULT_PASS_THRESHOLD,
        block_threshold: float = DEFAULT_BLOCK_THRESHOLD,
        judge: Optional[Callable[[str, list[str]], bool]] = None,
    ):
        if block_threshold > pass_threshold:
            raise ValueError("block_threshold must be <= pass_threshold")
        self.overlap_threshold = overlap_threshold
        self.pass_threshold = pass_threshold
        self.block_threshold = block_threshold
        self.judge = judge  # (sentence, chunk_texts) -> supported?

    def _sentence_supported_lexical(self, sentence: str, chunk_words: list[set[str]]) -> bool:
        words = content_words(sentence)
        if not words:
            return True  # vacuously supported: nothing to ground
        for cw in chunk_words:
            if len(words & cw) / len(words) >= self.overlap_threshold:
                return True
        return False

    def verify_answer(self, answer_text: str, chunk_texts: list[str]) -> Verdict:
        if not chunk_texts:
            return Verdict(0.0, (), "block", "lexical")
        sentences = split_sentences(answer_text)
        if not sentences:
            return Verdict(0.0, (), "block", "lexical")

        chunk_words = [content_words(c) for c in chunk_texts]
        method = "lexical"
        unsupported: list[int] = []
        if self.judge is not None:
            try:
                flags = [self.judge(s, chunk_texts) for s in sentences]
                method = "llm"
                unsupported = [i for i, ok in enumerate(flags) if not ok]
            except JudgeUnavailable:
                unsupported = []  # judge down: whole answer falls back to lexical
        if method == "lexical":
            unsupported = [
                i for i, s in enumerate(sentences)
                if not self._sentence_supported_lexical(s, chunk_words)
            ]

        score = (len(sentences) - len(unsupported)) / len(sentences)
        return Verdict(
            grounded_score=score,
            unsupported_sentences=tuple(unsupported),
            decision=_decision(score, self.pass_threshold, self.block_threshold),
            method=method,
        )
