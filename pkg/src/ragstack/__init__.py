"""On-premises enterprise RAG stack: retrieval core plus enterprise-stage
components (auth, guardrails, verification, observability), runnable at desk
scale against a bundled deterministic mock model server."""

__version__ = "0.1.0"
