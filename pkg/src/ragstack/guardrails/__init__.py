from ragstack.guardrails.refine import QueryRefiner, RefinedQuery
from ragstack.guardrails.screening import (
    DEFAULT_INJECTION_RULES,
    QueryScreen,
    ScreenRule,
    ScreenVerdict,
    load_rules,
)
from ragstack.guardrails.verify import AnswerVerifier, content_words, split_sentences

__all__ = [
    "AnswerVerifier",
    "DEFAULT_INJECTION_RULES",
    "QueryRefiner",
    "QueryScreen",
    "RefinedQuery",
    "ScreenRule",
    "ScreenVerdict",
    "content_words",
    "load_rules",
    "split_sentences",
]
