"""Cosine ranking of corpus candidates against the seed set."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from qflake.errors import DimensionMismatchError, ZeroVectorError
from qflake.simsearch.embedding import EmbeddingVector

DEFAULT_NEGATIVE_THRESHOLD = 0.5
DEFAULT_QUEUE_SIZE = 50


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u, v) / (|u| * |v|), clamped to [-1, 1] against rounding.

    Identical vectors short-circuit to exactly 1.0 so that self-similarity is
    not an ulp below the exclusion threshold used for identical matches.
    """
    if u.model_id != v.model_id:
        raise DimensionMismatchError(
            f"embeddings from different models: {u.model_id!r} vs {v.model_id!r}"
        )
    if u.dim != v.dim:
        raise DimensionMismatchError(f"dimension mismatch: {u.dim} vs {v.dim}")
    au, av = u.as_array(), v.as_array()
    nu, nv = float((au @ au) ** 0.5), float((av @ av) ** 0.5)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero vector")
    if u.values == v.values:
        return 1.0
    value = float(au @ av) / (nu * nv)
    return max(-1.0, min(1.0, value))


@dataclass(frozen=True)
class RankedCandidate:
    case_id: str
    score: float
    nearest_seed_id: str

    def __post_init__(self) -> None:
        if not -1.0 <= self.score <= 1.0 or not math.isfinite(self.score):
            raise ValueError("score must be a finite value in [-1, 1]")


def _max_over_seeds(
    vector: EmbeddingVector,
    seeds: Iterable[str],
    embeddings: Mapping[str, EmbeddingVector],
) -> tuple[float, str]:
    best_score = -2.0
    best_seed = ""
    for seed_id in sorted(seeds):
        score = cosine(vector, embeddings[seed_id])
        if score > best_score:
            best_score, best_seed = score, seed_id
    return best_score, best_seed


def rank_candidates(
    corpus: Iterable[str],
    seeds: Iterable[str],
    embeddings: Mapping[str, EmbeddingVector],
    k: int = DEFAULT_QUEUE_SIZE,
    *,
    excluded: Iterable[str] = (),
    aggregate: str = "max",
) -> list[RankedCandidate]:
    """Top-k corpus cases by max-over-seeds cosine similarity.

    Seeds and already-labeled cases are excluded; ties break by ascending
    case id so the queue is deterministic.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if aggregate not in ("max", "mean"):
        raise ValueError("aggregate must be 'max' or 'mean'")
    seed_set = set(seeds)
    skip = seed_set | set(excluded)
    if not seed_set:
        return []

    ranked: list[RankedCandidate] = []
    for candidate in sorted(set(corpus)):
        if candidate in skip:
            continue
        vector = embeddings[candidate]
        if aggregate == "max":
            score, nearest = _max_over_seeds(vector, seed_set, embeddings)
        else:
            scores = {s: cosine(vector, embeddings[s]) for s in seed_set}
            nearest = max(sorted(scores), key=lambda s: scores[s])
            score = sum(scores.values()) / len(scores)
        ranked.append(RankedCandidate(candidate, score, nearest))

    ranked.sort(key=lambda r: (-r.score, r.case_id))
    return ranked[:k]


def sample_non_flaky(
    corpus: Iterable[str],
    seeds: Iterable[str],
    embeddings: Mapping[str, EmbeddingVector],
    threshold: float = DEFAULT_NEGATIVE_THRESHOLD,
    n: int = 71,
    *,
    hard_negatives: Iterable[str] = (),
    include_hard_negatives: bool = False,
) -> list[str]:
    """Up to n cases whose max-over-seeds cosine is strictly below the threshold.

    Reviewer-marked hard negatives (cases the ranker wrongly surfaced as flaky)
    can be appended behind a flag; they are kept even though they score above
    the threshold. Ordering is deterministic: hard negatives first, then by
    descending similarity and ascending case id.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    if n <= 0:
        raise ValueError("n must be positive")
    seed_set = set(seeds)
    hard = [h for h in sorted(set(hard_negatives)) if h not in seed_set]

    scored: list[tuple[float, str]] = []
    for candidate in sorted(set(corpus)):
        if candidate in seed_set or candidate in hard:
            continue
        score, _ = _max_over_seeds(embeddings[candidate], seed_set, embeddings)
        if score < threshold:
            scored.append((score, candidate))
    scored.sort(key=lambda item: (-item[0], item[1]))

    picked: list[str] = []
    if include_hard_negatives:
        picked.extend(hard[:n])
    picked.extend(candidate for _, candidate in scored[: n - len(picked)])
    return picked
