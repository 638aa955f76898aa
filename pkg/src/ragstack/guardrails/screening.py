"""Input screening: deterministic rules first, optional LLM judge second.

The rules phase alone decides when judging is disabled, which keeps the
property suite fully deterministic. Rule files are line-oriented:
``rule_id<TAB or spaces>category<TAB or spaces>regex``, '#' comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from ragstack.errors import JudgeUnavailable


@dataclass(frozen=True)
class ScreenVerdict:
    decision: str  # allow | deny
    category: str  # ok | injection | unsafe_content | off_policy
    reason: str
    rule_id: Optional[str] = None

    def to_json(self) -> dict:
        return {"decision": self.decision, "category": self.category,
                "reason": self.reason, "rule_id": self.rule_id}


@dataclass(frozen=True)
class ScreenRule:
    rule_id: str
    category: str
    pattern: re.Pattern

    @classmethod
    def make(cls, rule_id: str, category: str, pattern: str) -> "ScreenRule":
        return cls(rule_id, category, re.compile(pattern, re.IGNORECASE))


DEFAULT_INJECTION_RULES = [
    ScreenRule.make("inj-ignore-instructions", "injection",
                    r"\bignore\s+(all\s+|any\s+)?(prior|previous|above|earlier)\s+instructions\b"),
    ScreenRule.make("inj-disregard-system", "injection",
                    r"\bdisregard\s+(the\s+|your\s+)?(system\s+prompt|instructions|guidelines)\b"),
    ScreenRule.make("inj-reveal-prompt", "injection",
                    r"\b(reveal|print|show|repeat)\s+(me\s+)?(your|the)\s+(system\s+prompt|hidden\s+instructions|initial\s+prompt)\b"),
    ScreenRule.make("inj-override-role", "injection",
                    r"\byou\s+are\s+now\s+(in\s+)?(developer\s+mode|dan|an?\s+unrestricted)\b"),
    ScreenRule.make("inj-new-instructions", "injection",
                    r"\b(new|updated)\s+instructions\s*:\s*"),
    ScreenRule.make("inj-pretend-norules", "injection",
                    r"\bpretend\s+(that\s+)?(you\s+have|there\s+are)\s+no\s+(rules|restrictions|guardrails)\b"),
]


def load_rules(path: str) -> list[ScreenRule]:
    rules = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 2)
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'id category regex'")
            rules.append(ScreenRule.make(*parts))
    return rules


class QueryScreen:
    def __init__(
        self,
        rules: Optional[list[ScreenRule]] = None,
        denylist: Optional[list[str]] = None,
        judge: Optional[Callable[[str], bool]] = None,
        fail_mode: str = "closed",  # judge outage: "open" allows, "closed" denies
    ):
        self.rules = DEFAULT_INJECTION_RULES if rules is None else rules
        self.denylist = [t.lower() for t in (denylist or [])]
        self.judge = judge
        self.fail_mode = fail_mode

    def screen_query(self, query: str) -> ScreenVerdict:
        for rule in self.rules:
            if rule.pattern.search(query):
                return ScreenVerdict("deny", rule.category,
                                     f"matched rule {rule.rule_id}", rule.rule_id)
        lowered = query.lower()
        for i, term in enumerate(self.denylist):
            if term in lowered:
                return ScreenVerdict("deny", "unsafe_content",
                                     "matched denylist term", f"deny-{i}")
        if self.judge is not None:
            try:
                allowed = self.judge(query)
            except JudgeUnavailable:
                if self.fail_mode == "open":
                    return ScreenVerdict("allow", "ok", "judge unavailable, fail-open")
                return ScreenVerdict("deny", "off_policy",
                                     "judge unavailable, fail-closed")
            if not allowed:
                return ScreenVerdict("deny", "off_policy", "judge rejected query")
        return ScreenVerdict("allow", "ok", "no rule matched")
