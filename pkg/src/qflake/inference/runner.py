"""Execute conversations against a provider, one forward pass per stage."""

from __future__ import annotations

import logging
import time

from qflake.inference.verdicts import (
    Verdict,
    VerdictStore,
    conversation_hash,
    verdict_from_response,
)
from qflake.promptkit.conversation import Conversation

logger = logging.getLogger(__name__)


def run_conversation(conversation: Conversation, provider) -> Verdict:
    """One completion request for the conversation's current stage.

    Transport retries live inside the provider adapter; a response that parses
    badly is recorded as unusable, never re-sampled.
    """
    started = time.monotonic()
    raw = provider.complete(conversation)
    latency_ms = int((time.monotonic() - started) * 1000)
    return verdict_from_response(
        raw, conversation.stage, latency_ms=latency_ms, provider=provider.name
    )


def run_and_store(
    conversation: Conversation,
    provider,
    store: VerdictStore,
    *,
    model_id: str,
    run_id: str,
) -> Verdict:
    """Run one stage unless the store already holds its verdict (resume)."""
    existing = store.get(
        conversation.case_id, conversation.condition.key, model_id, run_id, conversation.stage
    )
    if existing is not None:
        return existing
    verdict = run_conversation(conversation, provider)
    store.append(
        case_id=conversation.case_id,
        condition=conversation.condition.key,
        model_id=model_id,
        run_id=run_id,
        verdict=verdict,
        conversation_digest=conversation_hash(conversation),
    )
    return verdict
