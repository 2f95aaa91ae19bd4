"""Conversation rendering for the classification and root-cause stages.

Rendering is a pure function of (case, condition, dataset, template version):
identical inputs produce byte-identical conversations. A root-cause follow-up
extends the classification conversation, preserving conversational memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from qflake.codectx import FILE_UNIT, CodeContext, ContextLevel
from qflake.corpus.models import CaseArtifact, format_utc
from qflake.errors import (
    EmptyDescriptionError,
    MissingCodeContextError,
    NoEligibleExampleError,
)
from qflake.promptkit.conditions import (
    CodeContextLevel,
    EnrichmentLevel,
    ExperimentCondition,
    ReportLevel,
)
from qflake.promptkit.templates import PromptTemplates
from qflake.simsearch.embedding import EmbeddingProvider, EmbeddingScope, embed_case
from qflake.simsearch.ranking import cosine
from qflake.taxonomy import FLAKY_TOKEN, NON_FLAKY_TOKEN, ROOT_CAUSE_NAMES

SYSTEM = "system"
USER = "user"
ASSISTANT = "assistant"

STAGE_RQ3 = "rq3"
STAGE_RQ4 = "rq4"
STAGE_RQ5 = "rq5"

CODE_SECTION_HEADER = "Pre-fix code context"
COMMENTS_HEADER = "## Comments"


@dataclass(frozen=True)
class Turn:
    role: str
    content: str


@dataclass(frozen=True)
class Conversation:
    turns: tuple[Turn, ...]
    condition: ExperimentCondition
    case_id: str
    stage: str
    template_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "turns", tuple(self.turns))
        if not self.turns:
            raise ValueError("a conversation cannot be empty")

    def last_user_content(self) -> str:
        for turn in reversed(self.turns):
            if turn.role == USER:
                return turn.content
        return ""


def build_report_text(case: CaseArtifact, level: ReportLevel) -> str:
    """Partial: title + description. Full: the same text followed by every
    comment in chronological order with author markers."""
    if not case.description.strip():
        raise EmptyDescriptionError(f"{case.id} has no description")
    partial = f"# {case.title}\n\n{case.description}"
    if level is ReportLevel.PARTIAL:
        return partial
    entries = [
        f"[{i}] {c.author} at {format_utc(c.created_at)}:\n{c.body}"
        for i, c in enumerate(case.comments, start=1)
    ]
    body = ("\n" + "\n\n".join(entries)) if entries else ""
    return f"{partial}\n\n{COMMENTS_HEADER}{body}"


def render_code_section(code: CodeContext | None, level: CodeContextLevel) -> str:
    if level is CodeContextLevel.NONE:
        return ""
    if code is None or not code.present:
        raise MissingCodeContextError("condition requires code context the case lacks")
    blocks = []
    for unit in code.units:
        name = "" if unit.unit_name == FILE_UNIT else f" :: {unit.unit_name}"
        blocks.append(f"File: {unit.path}{name}\n```\n{unit.text}\n```")
    joined = "\n\n".join(blocks)
    return f"\n\n{CODE_SECTION_HEADER} ({level.value}):\n\n{joined}"


@dataclass(frozen=True)
class EnrichmentExample:
    case_id: str
    report_text: str
    code_section: str
    gold_token: str
    score: float


def select_enrichment(
    case: CaseArtifact,
    level: EnrichmentLevel,
    dataset: Sequence,
    embedder: EmbeddingProvider,
    *,
    code_level: CodeContextLevel = CodeContextLevel.NONE,
    contexts: Mapping[str, Mapping[ContextLevel, CodeContext]] | None = None,
) -> EnrichmentExample:
    """The highest-cosine labeled case under the matching report scope, emitted
    as a worked example with its gold label and (when the condition carries
    code) its code context at the same level.

    ``dataset`` items must expose ``.case`` (a CaseArtifact) and ``.flaky``.
    The query case itself is never eligible.
    """
    if level is EnrichmentLevel.NONE:
        raise ValueError("enrichment level E0 selects no example")
    scope = (
        EmbeddingScope.DESCRIPTION_ONLY
        if level is EnrichmentLevel.PARTIAL
        else EmbeddingScope.WITH_COMMENTS
    )
    report_level = (
        ReportLevel.PARTIAL if level is EnrichmentLevel.PARTIAL else ReportLevel.FULL
    )
    query_vec = embed_case(case, scope, embedder)

    best: tuple[float, str] | None = None
    by_id = {}
    for labeled in dataset:
        other = labeled.case
        if other.id == case.id:
            continue
        if code_level is not CodeContextLevel.NONE:
            ctx = _context_at(contexts, other.id, code_level)
            if ctx is None or not ctx.present:
                continue
        by_id[other.id] = labeled
        score = cosine(query_vec, embed_case(other, scope, embedder))
        if best is None or score > best[0] or (score == best[0] and other.id < best[1]):
            best = (score, other.id)

    if best is None:
        raise NoEligibleExampleError(f"no labeled case can serve as an example for {case.id}")
    score, chosen_id = best
    chosen = by_id[chosen_id]
    code_section = ""
    if code_level is not CodeContextLevel.NONE:
        code_section = render_code_section(_context_at(contexts, chosen_id, code_level), code_level)
    return EnrichmentExample(
        case_id=chosen_id,
        report_text=build_report_text(chosen.case, report_level),
        code_section=code_section,
        gold_token=FLAKY_TOKEN if chosen.flaky else NON_FLAKY_TOKEN,
        score=score,
    )


def _context_at(
    contexts: Mapping[str, Mapping[ContextLevel, CodeContext]] | None,
    case_id: str,
    code_level: CodeContextLevel,
) -> CodeContext | None:
    if contexts is None:
        return None
    level = ContextLevel.PARTIAL if code_level is CodeContextLevel.PARTIAL else ContextLevel.FULL
    return contexts.get(case_id, {}).get(level)


def build_conversation(
    case: CaseArtifact,
    condition: ExperimentCondition,
    code: CodeContext | None,
    templates: PromptTemplates,
    *,
    example: EnrichmentExample | None = None,
    dataset: Sequence | None = None,
    embedder: EmbeddingProvider | None = None,
    contexts: Mapping[str, Mapping[ContextLevel, CodeContext]] | None = None,
) -> Conversation:
    """Render the classification conversation for one case under one condition.

    Turn order: system instruction, optional worked-example turns, then the
    question turn holding the report text and, for code-bearing conditions, the
    extracted code. The enrichment example can be passed in (``example``) or
    selected here from ``dataset`` + ``embedder``.
    """
    if condition.enrichment is not EnrichmentLevel.NONE and example is None:
        if dataset is None or embedder is None:
            raise ValueError("enrichment requires an example or (dataset, embedder)")
        example = select_enrichment(
            case,
            condition.enrichment,
            dataset,
            embedder,
            code_level=condition.code_level,
            contexts=contexts,
        )

    turns = [Turn(SYSTEM, templates.system)]
    if condition.enrichment is not EnrichmentLevel.NONE:
        turns.append(
            Turn(
                USER,
                templates.example.format(
                    report=example.report_text, code_section=example.code_section
                ),
            )
        )
        turns.append(Turn(ASSISTANT, example.gold_token))

    report = build_report_text(case, condition.report_level)
    code_section = render_code_section(code, condition.code_level)
    turns.append(Turn(USER, templates.question.format(report=report, code_section=code_section)))

    stage = STAGE_RQ3 if condition.code_level is CodeContextLevel.NONE else STAGE_RQ4
    return Conversation(
        turns=tuple(turns),
        condition=condition,
        case_id=case.id,
        stage=stage,
        template_id=templates.template_id,
    )


def extend_for_root_cause(
    conversation: Conversation,
    assistant_reply: str,
    templates: PromptTemplates,
) -> Conversation:
    """Chain the root-cause follow-up onto a classification conversation,
    listing the nine classes verbatim and asking for exactly one."""
    classes = ", ".join(f'"{name}"' for name in ROOT_CAUSE_NAMES)
    turns = conversation.turns + (
        Turn(ASSISTANT, assistant_reply),
        Turn(USER, templates.root_cause.format(classes=classes)),
    )
    return Conversation(
        turns=turns,
        condition=conversation.condition,
        case_id=conversation.case_id,
        stage=STAGE_RQ5,
        template_id=conversation.template_id,
    )
