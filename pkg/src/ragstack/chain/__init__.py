from ragstack.chain.pipeline import (
    BASIC_STAGES,
    ENTERPRISE_STAGES,
    REFUSAL_TEXT,
    AssembledContext,
    Chain,
    PipelineConfig,
    QueryRequest,
    assemble_context,
    build_prompt,
    format_context_block,
)

__all__ = [
    "AssembledContext",
    "BASIC_STAGES",
    "Chain",
    "ENTERPRISE_STAGES",
    "PipelineConfig",
    "QueryRequest",
    "REFUSAL_TEXT",
    "assemble_context",
    "build_prompt",
    "format_context_block",
]
