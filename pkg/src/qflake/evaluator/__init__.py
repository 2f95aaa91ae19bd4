"""Classification metrics, experiment execution, and table rendering."""

from qflake.evaluator.metrics import (
    ConfusionCounts,
    MetricsReport,
    binary_metrics,
    multiclass_mcc,
    recall_only_metrics,
    root_cause_metrics,
    weighted_f1,
)
from qflake.evaluator.experiment import ExperimentCell, run_experiment
from qflake.evaluator.tables import (
    ReferenceRepoRow,
    RepoStats,
    TaxonomyCell,
    TaxonomyReport,
    check_reference_table,
    render_repo_stats,
    render_results_table,
    render_taxonomy,
    repo_stats,
    taxonomy_report,
)

__all__ = [
    "ConfusionCounts",
    "ExperimentCell",
    "MetricsReport",
    "ReferenceRepoRow",
    "RepoStats",
    "TaxonomyCell",
    "TaxonomyReport",
    "binary_metrics",
    "check_reference_table",
    "multiclass_mcc",
    "recall_only_metrics",
    "render_repo_stats",
    "render_results_table",
    "render_taxonomy",
    "repo_stats",
    "root_cause_metrics",
    "run_experiment",
    "taxonomy_report",
    "weighted_f1",
]
