from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qflake.corpus.models import CaseArtifact
from qflake.errors import (
    DimensionMismatchError,
    EmptyTextError,
    UnknownCandidateError,
    ZeroVectorError,
)
from qflake.simsearch.embedding import (
    EmbeddingScope,
    EmbeddingVector,
    MockEmbeddingProvider,
    embed_case,
    load_embeddings,
    save_embeddings,
)
from qflake.simsearch.expansion import (
    CONFIRM,
    REJECT,
    TriageLabel,
    expansion_step,
    initial_state,
    load_state,
    save_state,
)
from qflake.simsearch.ranking import cosine, rank_candidates, sample_non_flaky


def vec(*values: float, model: str = "m") -> EmbeddingVector:
    return EmbeddingVector(tuple(values), model, len(values))


class TestCosine:
    def test_identity_is_one(self):
        v = vec(0.3, -0.2, 0.9)
        assert cosine(v, v) == 1.0

    def test_orthogonal_is_zero(self):
        assert cosine(vec(1.0, 0.0), vec(0.0, 1.0)) == 0.0

    def test_known_value_45_degrees(self):
        # Direct formula: 1 / sqrt(2).
        assert cosine(vec(1.0, 0.0), vec(1.0, 1.0)) == pytest.approx(
            0.7071067812, abs=1e-9
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine(vec(1.0, 0.0), vec(1.0, 0.0, 0.0))

    def test_model_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine(vec(1.0, 0.0), vec(1.0, 0.0, model="other"))

    def test_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            cosine(vec(0.0, 0.0), vec(1.0, 0.0))

    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    )
    def test_symmetry(self, a, b):
        try:
            forward = cosine(vec(*a), vec(*b))
        except ZeroVectorError:
            return
        assert abs(forward - cosine(vec(*b), vec(*a))) < 1e-12

    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.floats(0.001, 100.0),
    )
    def test_scale_invariance(self, a, b, alpha):
        scaled = vec(*(alpha * x for x in a))
        try:
            left = cosine(scaled, vec(*b))
            right = cosine(vec(*a), vec(*b))
        except ZeroVectorError:
            return
        assert abs(left - right) < 1e-12

    def test_clamped_to_unit_interval(self):
        v = vec(0.1, 0.2, 0.30000000000000004)
        assert -1.0 <= cosine(v, v) <= 1.0


class TestMockEmbedder:
    def test_deterministic_across_instances(self):
        a = MockEmbeddingProvider().embed("some text")
        b = MockEmbeddingProvider().embed("some text")
        assert a == b

    def test_unit_norm(self):
        v = MockEmbeddingProvider().embed("anything")
        assert math.isclose(sum(x * x for x in v.values), 1.0, abs_tol=1e-9)

    def test_planted_angle_is_exact(self):
        provider = MockEmbeddingProvider()
        provider.plant("paraphrase", "original", 5.0)
        score = cosine(provider.embed("paraphrase"), provider.embed("original"))
        assert score == pytest.approx(math.cos(math.radians(5.0)), abs=1e-9)

    def test_embed_case_scope_and_determinism(self):
        case = CaseArtifact(
            id="A/r#1", kind="issue", number=1, title="t", description="body",
        )
        provider = MockEmbeddingProvider()
        a = embed_case(case, EmbeddingScope.DESCRIPTION_ONLY, provider)
        b = embed_case(case, EmbeddingScope.DESCRIPTION_ONLY, provider)
        assert a == b

    def test_empty_text_raises(self):
        case = CaseArtifact(
            id="A/r#1", kind="issue", number=1, title="", description="   ",
        )
        with pytest.raises(EmptyTextError):
            embed_case(case, EmbeddingScope.DESCRIPTION_ONLY, MockEmbeddingProvider())

    def test_save_load_round_trip(self, tmp_path):
        provider = MockEmbeddingProvider(dim=16)
        embeddings = {"a": provider.embed("a"), "b": provider.embed("b")}
        save_embeddings(embeddings, tmp_path / "emb.jsonl")
        assert load_embeddings(tmp_path / "emb.jsonl") == embeddings


def _geometry(n_noise: int = 20) -> tuple[list[str], dict[str, EmbeddingVector]]:
    provider = MockEmbeddingProvider(dim=64)
    provider.plant("near-seed", "seed-0", 5.0)
    corpus = ["seed-0", "seed-1", "near-seed"] + [f"noise-{i}" for i in range(n_noise)]
    embeddings = {cid: provider.embed(cid) for cid in corpus}
    return corpus, embeddings


class TestRankCandidates:
    def test_corpus_equal_to_seeds_is_empty(self):
        corpus, embeddings = _geometry()
        assert rank_candidates(["seed-0"], ["seed-0"], embeddings, 5) == []

    def test_planted_paraphrase_ranks_first(self):
        corpus, embeddings = _geometry()
        ranked = rank_candidates(corpus, ["seed-0", "seed-1"], embeddings, 10)
        assert ranked[0].case_id == "near-seed"
        assert ranked[0].nearest_seed_id == "seed-0"
        assert ranked[0].score > 0.99

    def test_scores_descending_with_id_tiebreak(self):
        corpus, embeddings = _geometry()
        ranked = rank_candidates(corpus, ["seed-0"], embeddings, 50)
        scores = [r.score for r in ranked]
        assert scores == sorted(scores, reverse=True)

    def test_orthogonal_candidate_scores_near_zero(self):
        provider = MockEmbeddingProvider(dim=8)
        provider.plant("ortho", "seed", 90.0)
        embeddings = {cid: provider.embed(cid) for cid in ("seed", "ortho")}
        ranked = rank_candidates(["seed", "ortho"], ["seed"], embeddings, 5)
        assert ranked[0].case_id == "ortho"
        assert abs(ranked[0].score) < 1e-9

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_adding_a_seed_never_lowers_scores(self, seed):
        import numpy as np

        rng = np.random.default_rng(seed)
        ids = [f"c{i}" for i in range(8)]
        embeddings = {}
        for cid in ids:
            raw = rng.standard_normal(6)
            embeddings[cid] = EmbeddingVector(tuple(raw / np.linalg.norm(raw)), "m", 6)
        base = {
            r.case_id: r.score
            for r in rank_candidates(ids, ["c0"], embeddings, len(ids))
        }
        more = {
            r.case_id: r.score
            for r in rank_candidates(ids, ["c0", "c1"], embeddings, len(ids))
        }
        for cid, score in more.items():
            if cid in base:
                assert score >= base[cid] - 1e-12


class TestExpansion:
    def test_unknown_candidate_rejected(self):
        corpus, embeddings = _geometry()
        state = initial_state(corpus, ["seed-0"], embeddings, k=10)
        with pytest.raises(UnknownCandidateError):
            expansion_step(
                state, {"not-queued": TriageLabel(CONFIRM, ("Network",))}, corpus, embeddings
            )

    def test_confirm_moves_into_seed_set_and_reject_never_requeues(self):
        corpus, embeddings = _geometry()
        state = initial_state(corpus, ["seed-0", "seed-1"], embeddings, k=10)
        queued = state.pending_queue[0].case_id
        rejected = state.pending_queue[1].case_id
        state = expansion_step(
            state,
            {
                queued: TriageLabel(CONFIRM, ("Randomness (PRNG)",)),
                rejected: TriageLabel(REJECT),
            },
            corpus,
            embeddings,
        )
        assert state.iteration == 1
        assert queued in state.all_seeds()
        assert rejected in state.rejected_ids
        assert all(c.case_id != rejected for c in state.pending_queue)
        # Disjointness across the whole run.
        assert not (state.all_seeds() & state.rejected_ids)

    def test_fixed_point_when_everything_rejected(self):
        corpus, embeddings = _geometry(n_noise=3)
        state = initial_state(corpus, ["seed-0"], embeddings, k=10)
        labels = {c.case_id: TriageLabel(REJECT) for c in state.pending_queue}
        state = expansion_step(state, labels, corpus, embeddings)
        assert state.fixed_point

    def test_convergence_within_corpus_size_iterations(self):
        corpus, embeddings = _geometry(n_noise=6)
        state = initial_state(corpus, ["seed-0"], embeddings, k=3)
        iterations = 0
        while state.pending_queue and iterations <= len(corpus):
            labels = {
                c.case_id: TriageLabel(CONFIRM, ("Others",))
                for c in state.pending_queue
            }
            state = expansion_step(state, labels, corpus, embeddings)
            iterations += 1
        assert iterations <= len(corpus)
        assert state.fixed_point

    def test_published_trajectory_shape(self):
        """Two triage iterations: 46 seeds, +15 confirmed, then +10 more,
        71 total (a 54% increase), then a fixed point."""
        provider = MockEmbeddingProvider(dim=64)
        seeds = [f"seed-{i}" for i in range(46)]
        wave_one = [f"wave1-{i}" for i in range(15)]
        wave_two = [f"wave2-{i}" for i in range(10)]
        noise = [f"noise-{i}" for i in range(60)]
        for i, cid in enumerate(wave_one):
            provider.plant(cid, seeds[i % len(seeds)], 5.0)
        for i, cid in enumerate(wave_two):
            # Similar to first-wave cases, farther from the original seeds, so
            # they only surface once the first wave has joined the seed set.
            provider.plant(cid, wave_one[i % len(wave_one)], 40.0)
        corpus = seeds + wave_one + wave_two + noise
        embeddings = {cid: provider.embed(cid) for cid in corpus}
        truly_flaky = set(wave_one) | set(wave_two)

        state = initial_state(corpus, seeds, embeddings, k=15)

        def review(state):
            """Reviewers confirm true positives in the queue, reject the rest."""
            return {
                c.case_id: (
                    TriageLabel(CONFIRM, ("Randomness (PRNG)",))
                    if c.case_id in truly_flaky
                    else TriageLabel(REJECT)
                )
                for c in state.pending_queue
            }

        labels_one = review(state)
        confirmed_one = [c for c, lab in labels_one.items() if lab.decision == CONFIRM]
        assert sorted(confirmed_one) == sorted(wave_one)
        state = expansion_step(state, labels_one, corpus, embeddings)

        labels_two = review(state)
        confirmed_two = [c for c, lab in labels_two.items() if lab.decision == CONFIRM]
        assert sorted(confirmed_two) == sorted(wave_two)
        state = expansion_step(state, labels_two, corpus, embeddings)

        total = len(state.all_seeds())
        assert total == 71
        assert round(100 * (total - 46) / 46) == 54

        labels_three = review(state)
        assert all(lab.decision == REJECT for lab in labels_three.values())
        state = expansion_step(state, labels_three, corpus, embeddings)
        assert state.fixed_point

    def test_state_round_trip(self, tmp_path):
        corpus, embeddings = _geometry()
        state = initial_state(corpus, ["seed-0"], embeddings, k=5)
        state = expansion_step(
            state,
            {state.pending_queue[0].case_id: TriageLabel(CONFIRM, ("Network",), "rev", "n")},
            corpus,
            embeddings,
        )
        save_state(state, tmp_path / "state.json")
        assert load_state(tmp_path / "state.json") == state


class TestSampleNonFlaky:
    def _fixed_embeddings(self) -> dict[str, EmbeddingVector]:
        # Exact cosines against the seed (1,1,1,1)/2: on-boundary = 0.5 exactly.
        return {
            "seed": vec(1.0, 1.0, 1.0, 1.0),
            "below": vec(0.49, math.sqrt(1 - 0.49**2), 0.0, 0.0),
            "above": vec(0.51, math.sqrt(1 - 0.51**2), 0.0, 0.0),
            "boundary": vec(2.0, 0.0, 0.0, 0.0),
        }

    def test_below_threshold_is_eligible(self):
        embeddings = self._fixed_embeddings()
        # cosine(seed, below) = (0.49 + y)/2 where y = sqrt(1-0.49^2): compute.
        picked = sample_non_flaky(embeddings, ["seed"], embeddings, 0.9, 10)
        assert "below" in picked

    def test_strict_boundary_exclusion(self):
        embeddings = self._fixed_embeddings()
        score = cosine(embeddings["seed"], embeddings["boundary"])
        assert score == 0.5  # exact: dot=2, norms 2*1
        picked = sample_non_flaky(embeddings, ["seed"], embeddings, 0.5, 10)
        assert "boundary" not in picked

    def test_seed_itself_never_eligible(self):
        embeddings = self._fixed_embeddings()
        picked = sample_non_flaky(embeddings, ["seed"], embeddings, 0.99, 10)
        assert "seed" not in picked

    def test_hard_negatives_included_behind_flag(self):
        embeddings = self._fixed_embeddings()
        without = sample_non_flaky(
            embeddings, ["seed"], embeddings, 0.5, 10, hard_negatives=["above"]
        )
        with_flag = sample_non_flaky(
            embeddings,
            ["seed"],
            embeddings,
            0.5,
            10,
            hard_negatives=["above"],
            include_hard_negatives=True,
        )
        assert "above" not in without
        assert with_flag[0] == "above"

    def test_threshold_validation(self):
        embeddings = self._fixed_embeddings()
        with pytest.raises(ValueError):
            sample_non_flaky(embeddings, ["seed"], embeddings, 1.5, 10)
