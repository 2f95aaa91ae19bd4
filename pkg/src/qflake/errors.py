"""Shared exception types."""

from __future__ import annotations


class QflakeError(Exception):
    """Base class for all package errors."""


class ConfigError(QflakeError):
    """Invalid or incomplete run configuration."""


# --- corpus ---------------------------------------------------------------


class AuthError(QflakeError):
    """Hosting API rejected the configured credentials."""


class RateLimitedError(QflakeError):
    """Hosting API rate limit hit; carries the retry-after duration."""

    def __init__(self, message: str, retry_after_s: float = 60.0) -> None:
        super().__init__(message)
        self.retry_after_s = retry_after_s


class NotFoundError(QflakeError):
    """Requested repository or resource does not exist."""


class IoError(QflakeError):
    """Snapshot or dataset I/O failed."""


class SchemaVersionMismatchError(QflakeError):
    """Persisted file carries a schema version this build cannot read."""


# --- codectx --------------------------------------------------------------


class NoLinkedChangeError(QflakeError):
    """Case has no fixing commits or PRs; it can only feed report-level runs."""


class ParseFailureError(QflakeError):
    """Source file could not be parsed by the grammar."""


class NonPythonError(QflakeError):
    """Method-level extraction requested for a non-Python source file."""


# --- simsearch ------------------------------------------------------------


class ProviderError(QflakeError):
    """Embedding or chat provider failed after bounded retries."""


class EmptyTextError(QflakeError):
    """Nothing to embed after normalization."""


class DimensionMismatchError(QflakeError):
    """Vectors are not comparable (different dimension or embedding model)."""


class ZeroVectorError(QflakeError):
    """Cosine similarity is undefined for a zero vector."""


class UnknownCandidateError(QflakeError):
    """A triage label referenced a case that is not in the pending queue."""


# --- promptkit ------------------------------------------------------------


class EmptyDescriptionError(QflakeError):
    """Case has no description to build a report from."""


class MissingCodeContextError(QflakeError):
    """Condition requires code context the case does not have."""


class NoEligibleExampleError(QflakeError):
    """No labeled case is available to serve as a few-shot example."""


# --- inference ------------------------------------------------------------


class ProviderUnavailableError(ProviderError):
    """Chat provider unreachable after bounded retries."""


class BudgetExceededError(QflakeError):
    """Planned request count exceeds the configured hard cap."""


# --- evaluator / store ----------------------------------------------------


class KeyMismatchError(QflakeError):
    """Predictions and gold labels are keyed by different case ids."""


class ValidationError(QflakeError):
    """Dataset failed invariant validation."""


class SchemaError(QflakeError):
    """Dataset layout or record violates the on-disk schema."""

    def __init__(self, message: str, path: str | None = None) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
