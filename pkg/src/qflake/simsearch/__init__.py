"""Embedding similarity search and the human-in-the-loop expansion loop."""

from qflake.simsearch.embedding import (
    EmbeddingScope,
    EmbeddingVector,
    HttpEmbeddingProvider,
    MockEmbeddingProvider,
    embed_case,
    embedding_text,
)
from qflake.simsearch.expansion import (
    ExpansionState,
    TriageLabel,
    expansion_step,
    load_state,
    save_state,
)
from qflake.simsearch.ranking import RankedCandidate, cosine, rank_candidates, sample_non_flaky

__all__ = [
    "EmbeddingScope",
    "EmbeddingVector",
    "ExpansionState",
    "HttpEmbeddingProvider",
    "MockEmbeddingProvider",
    "RankedCandidate",
    "TriageLabel",
    "cosine",
    "embed_case",
    "embedding_text",
    "expansion_step",
    "load_state",
    "rank_candidates",
    "sample_non_flaky",
    "save_state",
]
