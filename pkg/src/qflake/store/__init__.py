"""Labeled-dataset persistence in the two-tree (full/method) layout."""

from qflake.store.dataset import (
    Dataset,
    Violation,
    export_archive,
    load_dataset,
    persist_case,
    persist_dataset,
    validate_dataset,
)
from qflake.store.labels import LabeledCase, Provenance

__all__ = [
    "Dataset",
    "LabeledCase",
    "Provenance",
    "Violation",
    "export_archive",
    "load_dataset",
    "persist_case",
    "persist_dataset",
    "validate_dataset",
]
