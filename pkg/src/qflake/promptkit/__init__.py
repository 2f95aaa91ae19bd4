"""Deterministic prompt-conversation rendering under the condition matrix."""

from qflake.promptkit.conditions import (
    CodeContextLevel,
    EnrichmentLevel,
    ExperimentCondition,
    ReportLevel,
    enumerate_conditions,
)
from qflake.promptkit.conversation import (
    Conversation,
    Turn,
    build_conversation,
    build_report_text,
    extend_for_root_cause,
    select_enrichment,
)
from qflake.promptkit.templates import PromptTemplates, load_templates

__all__ = [
    "CodeContextLevel",
    "Conversation",
    "EnrichmentLevel",
    "ExperimentCondition",
    "PromptTemplates",
    "ReportLevel",
    "Turn",
    "build_conversation",
    "build_report_text",
    "enumerate_conditions",
    "extend_for_root_cause",
    "load_templates",
    "select_enrichment",
]
