"""Request orchestration across the basic/enterprise stage split.

Basic mode runs [retrieve, assemble, generate]; enterprise mode wraps that
core with [screen, refine, ..., verify]. A screen deny short-circuits into
a structured refusal Answer (still HTTP 200 at the boundary) with zero
retrieval or generation calls.
"""

from __future__ import annotations

import os
import threading
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Optional

from ragstack.core import Answer, Citation, Principal
from ragstack.errors import (
    GenerationFailed,
    ModelUnavailable,
    RetrievalFailed,
    UnknownTemplate,
)
from ragstack.guardrails import AnswerVerifier, QueryRefiner, QueryScreen
from ragstack.model_gateway import GenerationRequest, ModelClient
from ragstack.observability import JsonLogger, MetricsRegistry, Tracer, current_context
from ragstack.storage import MetadataStore
from ragstack.vector_index import SearchHit, VectorIndex

BASIC_STAGES = ("retrieve", "assemble", "generate")
ENTERPRISE_STAGES = ("screen", "refine", "retrieve", "assemble", "generate", "verify")
REFUSAL_TEXT = "I can't help with that request."
HISTORY_TURNS = 6

_TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "templates")


@dataclass(frozen=True)
class PipelineConfig:
    enterprise_enabled: bool = True
    k: int = 8
    context_token_budget: int = 2048
    max_answer_tokens: int = 256
    template_id: str = "answer-v1"

    @property
    def stages(self) -> tuple[str, ...]:
        return ENTERPRISE_STAGES if self.enterprise_enabled else BASIC_STAGES

    def to_json(self) -> dict:
        return {
            "stages": list(self.stages),
            "k": self.k,
            "context_token_budget": self.context_token_budget,
            "enterprise_enabled": self.enterprise_enabled,
        }


@dataclass(frozen=True)
class QueryRequest:
    query: str
    conversation_id: Optional[str] = None
    k: Optional[int] = None  # per-request override

    def __post_init__(self):
        if not self.query.strip():
            raise ValueError("query must be nonempty after trimming")


@dataclass
class AssembledContext:
    text: str
    included: list[tuple[SearchHit, str]] = field(default_factory=list)  # (hit, chunk_text)


def format_context_block(chunk_id: str, title: str, text: str) -> str:
    safe_title = title.replace("]", ")")
    return f"[CTX chunk_id={chunk_id} title={safe_title}]\n{text}\n[/CTX]"


def assemble_context(hits: list[SearchHit],
                     chunks: dict[str, tuple[str, str, int]],
                     budget: int) -> AssembledContext:
    """Greedy-skip packing in rank order: a chunk is included iff its token
    count fits the remaining budget; non-fitting chunks are skipped, not
    truncated, so every citation maps to displayable whole-chunk text.

    chunks maps chunk_id -> (text, title, token_count).
    """
    remaining = budget
    blocks: list[str] = []
    included: list[tuple[SearchHit, str]] = []
    for hit in hits:
        entry = chunks.get(hit.chunk_id)
        if entry is None:
            continue
        text, title, token_count = entry
        if token_count <= remaining:
            remaining -= token_count
            blocks.append(format_context_block(hit.chunk_id, title, text))
            included.append((hit, text))
    return AssembledContext(text="\n\n".join(blocks), included=included)


def build_prompt(context: str, query: str, template_id: str,
                 max_tokens: int = 256) -> GenerationRequest:
    base = os.path.join(_TEMPLATE_DIR, template_id)
    try:
        with open(base + ".system.txt", "r", encoding="utf-8") as fh:
            system = fh.read()
        with open(base + ".user.txt", "r", encoding="utf-8") as fh:
            user_template = fh.read()
    except FileNotFoundError:
        raise UnknownTemplate(template_id) from None
    user = user_template.replace("{context}", context).replace("{query}", query)
    return GenerationRequest(system_prompt=system, user_prompt=user,
                             max_tokens=max_tokens, temperature=0.0)


class Chain:
    def __init__(
        self,
        config: PipelineConfig,
        index: VectorIndex,
        metadata: MetadataStore,
        models: ModelClient,
        screen: Optional[QueryScreen] = None,
        refiner: Optional[QueryRefiner] = None,
        verifier: Optional[AnswerVerifier] = None,
        tracer: Optional[Tracer] = None,
        metrics: Optional[MetricsRegistry] = None,
        logger: Optional[JsonLogger] = None,
    ):
        self.config = config
        self.index = index
        self.metadata = metadata
        self.models = models
        self.screen = screen or QueryScreen()
        self.refiner = refiner or QueryRefiner()
        self.verifier = verifier or AnswerVerifier()
        self.tracer = tracer or Tracer("chain")
        self.metrics = metrics or MetricsRegistry()
        self.logger = logger or JsonLogger("chain")
        self._history: dict[str, deque[str]] = defaultdict(
            lambda: deque(maxlen=HISTORY_TURNS))
        self._history_lock = threading.Lock()

    def _chunk_lookup(self, hits: list[SearchHit]) -> dict[str, tuple[str, str, int]]:
        out: dict[str, tuple[str, str, int]] = {}
        titles: dict[str, str] = {}
        for hit in hits:
            try:
                payload = self.metadata.get_record("chunk", hit.chunk_id).payload
            except Exception:
                continue
            if hit.doc_id not in titles:
                try:
                    titles[hit.doc_id] = self.metadata.get_record(
                        "document", hit.doc_id).payload.get("title", hit.doc_id)
                except Exception:
                    titles[hit.doc_id] = hit.doc_id
            out[hit.chunk_id] = (payload["text"], titles[hit.doc_id],
                                 payload["token_count"])
        return out

    def answer_query(self, req: QueryRequest, principal: Principal) -> Answer:
        with self.tracer.start_span("chain.answer_query", service="chain"):
            return self._answer_query(req, principal)

    def _answer_query(self, req: QueryRequest, principal: Principal) -> Answer:
        executed: list[str] = []
        cfg = self.config
        trace_ctx = current_context()
        trace_id = trace_ctx.trace_id if trace_ctx else ""
        self.metrics.inc_counter("rag.chain.requests")

        history = []
        if req.conversation_id:
            with self._history_lock:
                history = list(self._history[req.conversation_id])

        query = req.query.strip()
        refined = query

        if "screen" in cfg.stages:
            with self.tracer.start_span("chain.screen", service="guardrails"):
                verdict = self.screen.screen_query(query)
            executed.append("screen")
            if verdict.decision == "deny":
                self.metrics.inc_counter("rag.chain.guardrail_denials")
                self.logger.warning("query denied by guardrail",
                                    category=verdict.category, rule_id=verdict.rule_id)
                return Answer(
                    text=REFUSAL_TEXT,
                    citations=(),
                    verification=None,
                    trace_id=trace_id,
                    stage_profile=tuple(executed),
                    refusal=True,
                    refusal_reason=f"{verdict.category}: {verdict.reason}",
                )

        if "refine" in cfg.stages:
            with self.tracer.start_span("chain.refine", service="guardrails"):
                refined = self.refiner.refine_query(query, history).refined
            executed.append("refine")

        k = req.k or cfg.k
        with self.tracer.start_span("chain.retrieve", service="chain"):
            try:
                with self.tracer.start_span("model_gateway.embed", service="model-gateway"):
                    qvec = self.models.embed([refined]).vectors[0]
                with self.tracer.start_span("index.search", service="index"):
                    hits = self.index.search(qvec, k, principal)
            except ModelUnavailable as exc:
                raise RetrievalFailed(str(exc)) from exc
        executed.append("retrieve")
        self.metrics.observe("rag.chain.retrieval_depth", len(hits))

        with self.tracer.start_span("chain.assemble", service="chain"):
            assembled = assemble_context(hits, self._chunk_lookup(hits),
                                         cfg.context_token_budget)
        executed.append("assemble")

        prompt = build_prompt(assembled.text, refined, cfg.template_id,
                              cfg.max_answer_tokens)
        with self.tracer.start_span("chain.generate", service="chain"):
            try:
                with self.tracer.start_span("model_gateway.generate", service="model-gateway"):
                    completion = self.models.generate(prompt)
            except ModelUnavailable as exc:
                raise GenerationFailed(str(exc)) from exc
        executed.append("generate")
        self.metrics.observe("rag.chain.generation_tokens",
                             completion.usage.completion_tokens)

        verification = None
        if "verify" in cfg.stages:
            with self.tracer.start_span("guardrails.verify", service="guardrails"):
                verification = self.verifier.verify_answer(
                    completion.text, [text for _hit, text in assembled.included])
            executed.append("verify")

        if req.conversation_id:
            with self._history_lock:
                self._history[req.conversation_id].append(query)

        self.logger.info("answered query", stages=executed, hits=len(hits),
                         included=len(assembled.included))
        return Answer(
            text=completion.text,
            citations=tuple(
                Citation(hit.chunk_id, hit.doc_id, hit.score)
                for hit, _text in assembled.included
            ),
            verification=verification,
            trace_id=trace_id,
            stage_profile=tuple(executed),
        )
