"""Wire types for the generation/embedding protocol (JSON over HTTP)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass(frozen=True)
class GenerationRequest:
    system_prompt: str
    user_prompt: str
    max_tokens: int = 256
    temperature: float = 0.0
    stop: Optional[tuple[str, ...]] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "system_prompt": self.system_prompt,
            "user_prompt": self.user_prompt,
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
            "stop": list(self.stop) if self.stop else None,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "GenerationRequest":
        stop = d.get("stop")
        return cls(
            system_prompt=d.get("system_prompt", ""),
            user_prompt=d.get("user_prompt", ""),
            max_tokens=int(d.get("max_tokens", 256)),
            temperature=float(d.get("temperature", 0.0)),
            stop=tuple(stop) if stop else None,
        )


@dataclass(frozen=True)
class Usage:
    prompt_tokens: int
    completion_tokens: int

    def to_json(self) -> dict[str, int]:
        return {"prompt_tokens": self.prompt_tokens,
                "completion_tokens": self.completion_tokens}


@dataclass(frozen=True)
class Completion:
    text: str
    finish_reason: str  # stop | length | filtered
    usage: Usage
    model_id: str

    def to_json(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "finish_reason": self.finish_reason,
            "usage": self.usage.to_json(),
            "model_id": self.model_id,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Completion":
        return cls(
            text=d["text"],
            finish_reason=d["finish_reason"],
            usage=Usage(d["usage"]["prompt_tokens"], d["usage"]["completion_tokens"]),
            model_id=d["model_id"],
        )


@dataclass(frozen=True)
class EmbeddingResponse:
    vectors: tuple[tuple[float, ...], ...]
    dimension: int
    model_id: str

    def to_json(self) -> dict[str, Any]:
        return {
            "vectors": [list(v) for v in self.vectors],
            "dimension": self.dimension,
            "model_id": self.model_id,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "EmbeddingResponse":
        return cls(
            vectors=tuple(tuple(float(x) for x in v) for v in d["vectors"]),
            dimension=int(d["dimension"]),
            model_id=d["model_id"],
        )
