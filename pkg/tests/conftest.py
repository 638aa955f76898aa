import threading
import time

import httpx
import pytest
import uvicorn
from fastapi.testclient import TestClient

from ragstack.api import create_stack
from ragstack.chain import PipelineConfig
from ragstack.core import AccessPolicy
from ragstack.loader import ChunkingConfig, IngestRequest
from ragstack.model_gateway import ModelClient, create_mock_app
from ragstack.observability import InMemoryExporter, JsonLogger, MetricsRegistry, Tracer

MOCK_DIMENSION = 64


@pytest.fixture(scope="session")
def mock_model_app():
    return create_mock_app(MOCK_DIMENSION)


@pytest.fixture()
def model_client(mock_model_app):
    http = TestClient(mock_model_app)
    return ModelClient(
        generation_endpoint="http://testserver",
        embedding_endpoint="http://testserver",
        http=http,
        sleep=lambda _s: None,
    )


class CountingModelClient(ModelClient):
    """Wraps the mock-backed client with call counters for stage assertions."""

    def __init__(self, inner: ModelClient):
        self.__dict__.update(inner.__dict__)
        self.generate_calls = 0
        self.embed_calls = 0

    def generate(self, req):
        self.generate_calls += 1
        return super().generate(req)

    def embed(self, texts):
        self.embed_calls += 1
        return super().embed(texts)


@pytest.fixture()
def counting_model_client(model_client):
    return CountingModelClient(model_client)


def make_stack(tmp_path, models, enterprise=True, chunking=None, exporter=None,
               logger_sink=None):
    env = {
        "STORAGE_BACKEND": "fs",
        "STORAGE_ROOT": str(tmp_path / "blobs"),
        "METADATA_PATH": str(tmp_path / "meta.jsonl"),
        "TELEMETRY_MODE": "off",
        "EMBEDDING_DIMENSION": str(MOCK_DIMENSION),
    }
    telemetry = None
    if exporter is not None or logger_sink is not None:
        telemetry = (
            Tracer("gateway", exporter),
            MetricsRegistry(),
            JsonLogger("gateway", sink=logger_sink),
        )
    return create_stack(
        env=env,
        models=models,
        pipeline=PipelineConfig(enterprise_enabled=enterprise),
        chunking=chunking or ChunkingConfig(max_chunk_tokens=64, overlap_tokens=12),
        telemetry=telemetry,
    )


@pytest.fixture()
def stack(tmp_path, counting_model_client):
    return make_stack(tmp_path, counting_model_client)


@pytest.fixture()
def api(stack):
    return TestClient(stack.app)


FIXTURE_DOCS = {
    "handbook.md": (
        "# Employee Handbook\n\n"
        "Vacation policy grants twenty days of paid leave each year. "
        "Unused vacation days roll over for one calendar year.\n\n"
        "Remote work is allowed up to three days per week. "
        "Employees coordinate remote days with their team lead.\n"
    ),
    "security.md": (
        "# Security Guide\n\n"
        "All laptops must use full disk encryption. "
        "Security incidents are reported to the security team within one hour.\n\n"
        "Passwords rotate every ninety days. "
        "Shared accounts are forbidden in production systems.\n"
    ),
    "finance.md": (
        "# Finance Notes\n\n"
        "Quarterly budgets are reviewed by the finance group. "
        "Expense reports require receipts above fifty euros.\n\n"
        "Invoices are paid within thirty days of approval.\n"
    ),
}

FIXTURE_ACLS = {
    "handbook.md": AccessPolicy(public=True),
    "security.md": AccessPolicy(allowed_groups=frozenset({"security", "eng"})),
    "finance.md": AccessPolicy(allowed_groups=frozenset({"finance"})),
}


def ingest_fixture_corpus(stack):
    reports = {}
    for name, text in FIXTURE_DOCS.items():
        reports[name] = stack.ingestor.ingest(
            IngestRequest(source_uri=f"fixture/{name}", acl=FIXTURE_ACLS[name]),
            raw=text.encode(),
        )
    return reports


@pytest.fixture()
def seeded_stack(stack):
    ingest_fixture_corpus(stack)
    stack.auth.add_user("alice", "alice-secret", {"eng", "all"})
    stack.auth.add_user("bob", "bob-secret", {"finance", "all"})
    stack.auth.add_user("root", "root-secret", {"admin"})
    return stack


@pytest.fixture()
def seeded_api(seeded_stack):
    return TestClient(seeded_stack.app)


def login(api, user_id, secret):
    resp = api.post("/v1/auth/login", json={"user_id": user_id, "secret": secret})
    assert resp.status_code == 200, resp.text
    return {"Authorization": f"Bearer {resp.json()['token']}"}


@pytest.fixture(scope="session")
def live_mock_server():
    """Real uvicorn mock-model server for tests that need a TCP endpoint."""
    app = create_mock_app(MOCK_DIMENSION)
    config = uvicorn.Config(app, host="127.0.0.1", port=18081, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    url = "http://127.0.0.1:18081"
    while time.time() < deadline:
        try:
            if httpx.get(url + "/v1/health", timeout=1.0).status_code == 200:
                break
        except httpx.TransportError:
            time.sleep(0.05)
    else:
        raise RuntimeError("mock server did not start")
    yield url
    server.should_exit = True
    thread.join(timeout=5)
