"""Versioned prompt templates shipped as data files.

Wording lives in plain-text files under ``templates/<version>/`` with named
placeholders; the template id and a content hash are recorded in every
experiment output so a wording change can never silently alter results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

DEFAULT_TEMPLATE_VERSION = "v1"

_FILES = ("system.txt", "question.txt", "example.txt", "root_cause.txt")


@dataclass(frozen=True)
class PromptTemplates:
    version: str
    system: str
    question: str
    example: str
    root_cause: str

    @property
    def content_hash(self) -> str:
        digest = hashlib.sha256()
        for part in (self.system, self.question, self.example, self.root_cause):
            digest.update(part.encode("utf-8"))
        return digest.hexdigest()[:16]

    @property
    def template_id(self) -> str:
        return f"{self.version}:{self.content_hash}"


def load_templates(
    version: str = DEFAULT_TEMPLATE_VERSION,
    templates_dir: str | Path | None = None,
) -> PromptTemplates:
    """Load a template set from a directory, or from the packaged defaults."""
    if templates_dir is not None:
        base = Path(templates_dir) / version
        texts = {name: (base / name).read_text(encoding="utf-8") for name in _FILES}
    else:
        root = resources.files("qflake.promptkit") / "templates" / version
        texts = {name: (root / name).read_text(encoding="utf-8") for name in _FILES}
    return PromptTemplates(
        version=version,
        system=texts["system.txt"].strip("\n"),
        question=texts["question.txt"].strip("\n"),
        example=texts["example.txt"].strip("\n"),
        root_cause=texts["root_cause.txt"].strip("\n"),
    )
