import os

import pytest
from hypothesis import given, strategies as st

from ragstack.core import chunk_identifier, estimate_tokens, normalize_text
from ragstack.errors import DecodeError

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


class TestNormalizeText:
    def test_crlf_to_lf(self):
        assert normalize_text("a\r\nb") == "a\nb"

    def test_empty(self):
        assert normalize_text("") == ""

    def test_golden_fixture(self):
        with open(os.path.join(FIXTURES, "mixed_ws.txt"), "rb") as fh:
            raw = fh.read()
        with open(os.path.join(FIXTURES, "mixed_ws.golden"), "r", encoding="utf-8") as fh:
            golden = fh.read()
        assert normalize_text(raw) == golden

    def test_bom_stripped(self):
        assert normalize_text(b"\xef\xbb\xbfhi") == "hi"

    def test_invalid_utf8(self):
        with pytest.raises(DecodeError):
            normalize_text(b"\xff\xfe\x01")

    def test_code_fence_preserved(self):
        text = "a   b\n```\nx    y\t z\n```\nc   d"
        out = normalize_text(text)
        assert "x    y\t z" in out
        assert "a b" in out and "c d" in out

    @given(st.text(max_size=300))
    def test_idempotent(self, s):
        once = normalize_text(s)
        assert normalize_text(once) == once


class TestEstimateTokens:
    def test_empty(self):
        assert estimate_tokens("") == 0

    def test_three_words(self):
        # ceil(3 * 4/3) = 4
        assert estimate_tokens("one two three") == 4

    def test_single_word(self):
        # ceil(1 * 4/3) = 2
        assert estimate_tokens("word") == 2

    @given(st.text(alphabet=" abcdef\n", max_size=200),
           st.text(alphabet=" abcdef\n", max_size=200))
    def test_monotone_under_concatenation(self, a, b):
        combined = estimate_tokens(a + b)
        assert combined >= max(estimate_tokens(a), estimate_tokens(b))


class TestChunkIdentifier:
    def test_deterministic(self):
        assert chunk_identifier("d", 1, 0) == chunk_identifier("d", 1, 0)

    def test_seq_sensitive(self):
        assert chunk_identifier("d", 1, 0) != chunk_identifier("d", 1, 1)

    def test_version_sensitive(self):
        assert chunk_identifier("d", 1, 0) != chunk_identifier("d", 2, 0)

    def test_doc_sensitive(self):
        assert chunk_identifier("d1", 1, 0) != chunk_identifier("d2", 1, 0)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            chunk_identifier("d", 1, -1)
        with pytest.raises(ValueError):
            chunk_identifier("d", 0, 0)

    def test_fuzz_no_collisions(self):
        import random

        rng = random.Random(42)
        seen = {}
        for _ in range(10_000):
            triple = (f"doc-{rng.randrange(500)}", rng.randrange(1, 20),
                      rng.randrange(200))
            ident = chunk_identifier(*triple)
            if ident in seen:
                assert seen[ident] == triple, "collision across distinct triples"
            seen[ident] = triple


class TestRoundTrips:
    def test_answer_roundtrip(self):
        from ragstack.core import Answer, Citation, Verdict

        answer = Answer(
            text="hello",
            citations=(Citation("c1", "d1", 0.5),),
            verification=Verdict(0.75, (1,), "flag", "lexical"),
            trace_id="abc",
            stage_profile=("retrieve", "assemble", "generate"),
        )
        assert Answer.from_json(answer.to_json()) == answer

    def test_document_roundtrip(self):
        from ragstack.core import AccessPolicy, Document, content_digest, utcnow

        doc = Document("d1", "file:///x", "X", content_digest("body"), 2,
                       AccessPolicy(frozenset({"g"}), frozenset(), False), utcnow())
        assert Document.from_json(doc.to_json()) == doc
