"""Query refinement: deterministic normalization, optional LLM rewrite.

All failure paths fall back to the original query; refinement can never
lose a request.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

GREETINGS = ("hello", "hi", "hey", "greetings", "good morning", "good afternoon",
             "good evening")
FILLERS = ("please", "kindly", "um", "uh", "basically", "actually")

_PRONOUN_RE = re.compile(r"\b(it|that)\b")
_QUOTED_RE = re.compile(r"\"([^\"]+)\"|'([^']+)'")
# capitalized run not at sentence start, e.g. "the Loader component"
_CAP_RUN_RE = re.compile(r"(?<=[a-z,;] )((?:[A-Z][A-Za-z0-9_-]*\s?)+)")

MAX_REWRITE_GROWTH = 4


@dataclass(frozen=True)
class RefinedQuery:
    original: str
    refined: str
    method: str  # rules_only | llm
    changed: bool

    def to_json(self) -> dict:
        return {"original": self.original, "refined": self.refined,
                "method": self.method, "changed": self.changed}


def _strip_greetings_and_fillers(query: str) -> str:
    out = query.strip()
    lowered = out.lower()
    for greeting in GREETINGS:
        if lowered.startswith(greeting):
            rest = out[len(greeting):].lstrip(" ,.!")
            if rest:
                out = rest
                lowered = out.lower()
    words = out.split()
    kept = [w for w in words if w.lower().strip(",.!?") not in FILLERS]
    if kept:
        out = " ".join(kept)
    return out or query


def _referent_candidates(turn: str) -> list[str]:
    candidates = [a or b for a, b in _QUOTED_RE.findall(turn)]
    candidates += [m.strip() for m in _CAP_RUN_RE.findall(turn)]
    # dedupe, order-preserving
    seen: list[str] = []
    for c in candidates:
        if c and c not in seen:
            seen.append(c)
    return seen


def _resolve_pronoun(query: str, history: list[str]) -> str:
    if not history or not _PRONOUN_RE.search(query):
        return query
    candidates = _referent_candidates(history[-1])
    if len(candidates) != 1:
        return query  # ambiguous or no referent: leave unchanged
    return _PRONOUN_RE.sub(candidates[0], query, count=1)


class QueryRefiner:
    def __init__(self, rewrite: Optional[Callable[[str, list[str]], str]] = None):
        # rewrite: (query, history) -> rewritten text; None = rules_only mode
        self.rewrite = rewrite

    def refine_query(self, query: str, history: Optional[list[str]] = None) -> RefinedQuery:
        history = history or []
        if self.rewrite is not None:
            try:
                candidate = self.rewrite(query, history).strip()
            except Exception:
                candidate = ""
            if candidate and len(candidate) < MAX_REWRITE_GROWTH * max(len(query), 1):
                return RefinedQuery(query, candidate, "llm", candidate != query)
            return RefinedQuery(query, query, "llm", False)

        refined = _strip_greetings_and_fillers(query)
        refined = _resolve_pronoun(refined, history)
        return RefinedQuery(query, refined, "rules_only", refined != query)
