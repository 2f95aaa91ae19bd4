"""Chat-completion providers, verdict parsing, and the append-only verdict store."""

from qflake.inference.providers import (
    DecodingConfig,
    HttpChatProvider,
    MockChatProvider,
    ProviderConfig,
    TokenBucket,
    build_provider,
)
from qflake.inference.runner import run_conversation
from qflake.inference.verdicts import (
    OUTCOME_FLAKY,
    OUTCOME_NON_FLAKY,
    OUTCOME_ROOT_CAUSE,
    OUTCOME_UNUSABLE,
    Verdict,
    VerdictStore,
    parse_verdict,
)

__all__ = [
    "DecodingConfig",
    "HttpChatProvider",
    "MockChatProvider",
    "OUTCOME_FLAKY",
    "OUTCOME_NON_FLAKY",
    "OUTCOME_ROOT_CAUSE",
    "OUTCOME_UNUSABLE",
    "ProviderConfig",
    "TokenBucket",
    "Verdict",
    "VerdictStore",
    "build_provider",
    "parse_verdict",
    "run_conversation",
]
