"""Exception hierarchy shared by all services.

Every error carries a stable machine-readable ``code`` so the API boundary
can map exceptions to ApiError bodies without string matching.
"""


class RagError(Exception):
    code = "internal_error"
    http_status = 500

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


class DecodeError(RagError):
    code = "decode_error"
    http_status = 422


class DimensionMismatch(RagError):
    code = "dimension_mismatch"
    http_status = 422


class ZeroVector(RagError):
    code = "zero_vector"
    http_status = 422


class NonFiniteEntry(RagError):
    code = "non_finite_entry"
    http_status = 422


class NotFound(RagError):
    code = "not_found"
    http_status = 404


class StorageUnavailable(RagError):
    code = "storage_unavailable"
    http_status = 503


class QuotaExceeded(RagError):
    code = "quota_exceeded"
    http_status = 507


class SchemaViolation(RagError):
    code = "schema_violation"
    http_status = 422


class EmptyDocument(RagError):
    code = "empty_document"
    http_status = 422


class SourceUnreachable(RagError):
    code = "source_unreachable"
    http_status = 422


class ParseError(RagError):
    code = "parse_error"
    http_status = 422


class UnsupportedFormat(RagError):
    code = "unsupported_format"
    http_status = 422


class EmbeddingUnavailable(RagError):
    code = "embedding_unavailable"
    http_status = 503


class ModelUnavailable(RagError):
    code = "model_unavailable"
    http_status = 503


class ContextTooLong(RagError):
    code = "context_too_long"
    http_status = 422


class EmptyInput(RagError):
    code = "empty_input"
    http_status = 422


class InvalidCredentials(RagError):
    code = "invalid_credentials"
    http_status = 401


class AccountDisabled(RagError):
    code = "account_disabled"
    http_status = 403


class Unauthorized(RagError):
    code = "unauthorized"
    http_status = 401


class Forbidden(RagError):
    code = "forbidden"
    http_status = 403


class JudgeUnavailable(RagError):
    code = "judge_unavailable"
    http_status = 503


class RetrievalFailed(RagError):
    code = "retrieval_failed"
    http_status = 502


class GenerationFailed(RagError):
    code = "generation_failed"
    http_status = 502


class UnknownTemplate(RagError):
    code = "unknown_template"
    http_status = 422
