"""Stack assembly: build all services and the gateway from configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI

from ragstack.api.gateway import create_gateway
from ragstack.auth import AuthService
from ragstack.chain import Chain, PipelineConfig
from ragstack.guardrails import AnswerVerifier, QueryRefiner, QueryScreen
from ragstack.loader import ChunkingConfig, Ingestor
from ragstack.model_gateway import ModelClient
from ragstack.observability import telemetry_from_env
from ragstack.storage import MetadataStore, blob_store_from_env
from ragstack.vector_index import VectorIndex


@dataclass
class Stack:
    app: FastAPI
    auth: AuthService
    ingestor: Ingestor
    chain: Chain
    index: VectorIndex
    models: ModelClient


def create_stack(
    env: Optional[dict[str, str]] = None,
    models: Optional[ModelClient] = None,
    pipeline: Optional[PipelineConfig] = None,
    chunking: Optional[ChunkingConfig] = None,
    auth: Optional[AuthService] = None,
    telemetry=None,  # (tracer, metrics, logger) override
) -> Stack:
    env = dict(os.environ if env is None else env)
    models = models or ModelClient(
        generation_endpoint=env.get("GENERATION_ENDPOINT"),
        embedding_endpoint=env.get("EMBEDDING_ENDPOINT"),
    )
    dimension = int(env.get("EMBEDDING_DIMENSION", "0")) or int(
        models.health().get("dimension", 64))

    tracer, metrics, logger = telemetry or telemetry_from_env("gateway", env)
    blob = blob_store_from_env(env)
    metadata = MetadataStore(env.get("METADATA_PATH"))
    index = VectorIndex(dimension)
    auth = auth or AuthService()
    ingestor = Ingestor(blob, metadata, index, models,
                        chunking or ChunkingConfig())
    chain = Chain(
        config=pipeline or PipelineConfig(),
        index=index,
        metadata=metadata,
        models=models,
        screen=QueryScreen(),
        refiner=QueryRefiner(),
        verifier=AnswerVerifier(),
        tracer=tracer,
        metrics=metrics,
        logger=logger,
    )
    app = create_gateway(auth, ingestor, chain, models, tracer, metrics, logger)
    return Stack(app=app, auth=auth, ingestor=ingestor, chain=chain,
                 index=index, models=models)
