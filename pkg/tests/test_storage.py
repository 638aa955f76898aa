import hashlib
import random
import threading

import pytest
from fastapi.testclient import TestClient

from ragstack.errors import NotFound, SchemaViolation
from ragstack.storage import FSBlobStore, MetadataStore, S3BlobStore
from ragstack.storage.s3_server import create_s3_app


@pytest.fixture(params=["fs", "s3"])
def blob_store(request, tmp_path):
    """The identical suite runs against both backends (substitutability)."""
    if request.param == "fs":
        return FSBlobStore(str(tmp_path / "blobs"))
    app = create_s3_app(FSBlobStore(str(tmp_path / "s3root")))
    return S3BlobStore("http://testserver", client=TestClient(app))


class TestBlobStore:
    def test_put_get_roundtrip_1mib(self, blob_store):
        data = random.Random(7).randbytes(1 << 20)
        ref = blob_store.put_object("docs", "big.bin", data)
        assert ref.size_bytes == len(data)
        assert ref.etag == hashlib.sha256(data).hexdigest()
        assert blob_store.get_object("docs", "big.bin") == data

    def test_overwrite_last_write_wins(self, blob_store):
        blob_store.put_object("docs", "k", b"first")
        ref = blob_store.put_object("docs", "k", b"second")
        assert blob_store.get_object("docs", "k") == b"second"
        assert ref.etag == hashlib.sha256(b"second").hexdigest()

    def test_empty_object(self, blob_store):
        ref = blob_store.put_object("docs", "empty", b"")
        assert ref.size_bytes == 0
        assert blob_store.get_object("docs", "empty") == b""

    def test_get_absent_key(self, blob_store):
        with pytest.raises(NotFound):
            blob_store.get_object("docs", "missing")

    def test_delete_then_get(self, blob_store):
        blob_store.put_object("docs", "gone", b"x")
        blob_store.delete_object("docs", "gone")
        with pytest.raises(NotFound):
            blob_store.get_object("docs", "gone")

    def test_list_empty_bucket(self, blob_store):
        assert blob_store.list_objects("nothing-here") == []

    def test_list_prefix_filter(self, blob_store):
        for key in ("a/1", "a/2", "b/1"):
            blob_store.put_object("docs", key, key.encode())
        keys = [r.key for r in blob_store.list_objects("docs", "a/")]
        assert keys == ["a/1", "a/2"]

    def test_list_matches_bruteforce_oracle(self, blob_store):
        rng = random.Random(11)
        keys = {f"{rng.choice('abc')}/{rng.randrange(400)}" for _ in range(300)}
        for key in keys:
            blob_store.put_object("docs", key, b"v")
        for prefix in ("", "a/", "b/", "c/1", "zz"):
            expected = sorted(k for k in keys if k.startswith(prefix))
            got = [r.key for r in blob_store.list_objects("docs", prefix)]
            assert got == expected

    @pytest.mark.parametrize("size", [0, 1, 4095, 4096])
    def test_roundtrip_boundary_sizes(self, blob_store, size):
        data = random.Random(size).randbytes(size)
        blob_store.put_object("docs", f"sz-{size}", data)
        assert blob_store.get_object("docs", f"sz-{size}") == data

    def test_roundtrip_random_sizes(self, blob_store):
        rng = random.Random(3)
        for i in range(100):
            data = rng.randbytes(rng.randrange(0, 8192))
            blob_store.put_object("docs", f"r-{i}", data)
            assert blob_store.get_object("docs", f"r-{i}") == data


def test_atomic_overwrite_no_torn_reads(tmp_path):
    store = FSBlobStore(str(tmp_path))
    values = [bytes([i]) * 4096 for i in range(8)]
    store.put_object("b", "hot", values[0])
    stop = threading.Event()
    errors = []

    def writer():
        i = 0
        while not stop.is_set():
            store.put_object("b", "hot", values[i % len(values)])
            i += 1

    def reader():
        while not stop.is_set():
            data = store.get_object("b", "hot")
            if len(data) != 4096 or len(set(data)) != 1:
                errors.append(data[:8])

    threads = [threading.Thread(target=writer)] + [
        threading.Thread(target=reader) for _ in range(3)]
    for t in threads:
        t.start()
    threading.Event().wait(1.0)
    stop.set()
    for t in threads:
        t.join()
    assert errors == []


class TestMetadataStore:
    def make_doc(self, doc_id="d1", version=1):
        from ragstack.core import AccessPolicy, Document, content_digest, utcnow

        return Document(doc_id, "file:///s", "T", content_digest("c"), version,
                        AccessPolicy(public=True), utcnow()).to_json()

    def test_upsert_then_get(self):
        store = MetadataStore()
        payload = self.make_doc()
        store.upsert_record("document", "d1", payload)
        assert store.get_record("document", "d1").payload == payload

    def test_schema_violation(self):
        store = MetadataStore()
        with pytest.raises(SchemaViolation):
            store.upsert_record("document", "d1", {"doc_id": "d1"})

    def test_unknown_record_type(self):
        store = MetadataStore()
        with pytest.raises(SchemaViolation):
            store.upsert_record("mystery", "k", {})

    def test_query_matches_linear_scan_oracle(self):
        store = MetadataStore()
        rng = random.Random(5)
        rows = []
        for i in range(100):
            doc = self.make_doc(doc_id=f"d{rng.randrange(10)}", version=1)
            key = f"rec-{i}"
            store.upsert_record("document", key, doc)
            rows.append((key, doc))
        # last write per key wins
        latest = dict(rows)
        for target in [f"d{i}" for i in range(10)]:
            expected = sorted(k for k, d in latest.items() if d["doc_id"] == target)
            got = [r.key for r in store.query_records("document", {"doc_id": target})]
            assert got == expected

    def test_persistence_roundtrip(self, tmp_path):
        path = str(tmp_path / "meta.jsonl")
        store = MetadataStore(path)
        store.upsert_record("document", "d1", self.make_doc())
        reloaded = MetadataStore(path)
        assert reloaded.get_record("document", "d1").payload["doc_id"] == "d1"

    def test_get_absent(self):
        with pytest.raises(NotFound):
            MetadataStore().get_record("document", "nope")
