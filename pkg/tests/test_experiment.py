from __future__ import annotations

import pytest

from qflake.errors import BudgetExceededError
from qflake.evaluator.experiment import (
    eligible_flaky_cases,
    read_results,
    run_experiment,
    write_results,
)
from qflake.inference.providers import ProviderConfig
from qflake.inference.verdicts import VerdictStore
from qflake.promptkit.conditions import (
    CodeContextLevel,
    EnrichmentLevel,
    ExperimentCondition,
    ReportLevel,
    enumerate_conditions,
)

MOCK = ProviderConfig(name="mock", model_id="mock-scripted-v1")

Rp, Rf = ReportLevel.PARTIAL, ReportLevel.FULL
Cp, Cf = CodeContextLevel.PARTIAL, CodeContextLevel.FULL


class TestEligibility:
    @pytest.mark.parametrize(
        "report,code,expected",
        [(Rp, Cp, 44), (Rp, Cf, 64), (Rf, Cp, 38), (Rf, Cf, 56)],
    )
    def test_per_cell_totals_match_published_asymmetry(
        self, replica_dataset, report, code, expected
    ):
        condition = ExperimentCondition(report, code)
        assert len(eligible_flaky_cases(replica_dataset, condition)) == expected


class TestRunExperiment:
    def test_base_conditions_produce_expected_accounting(self, replica_dataset, tmp_path):
        cells = run_experiment(
            replica_dataset,
            enumerate_conditions(include_enrichment=False),
            [MOCK],
            store_path=tmp_path / "verdicts.jsonl",
        )
        assert len(cells) == 4
        by_key = {c.condition.key: c for c in cells}

        for cell in cells:
            assert not cell.incomplete
            # One planted corrupt classification response reduces RQ3 to 141.
            assert cell.rq3.attempted == 142
            assert cell.rq3.unusable == 1
            assert cell.rq3.usable == 141

        assert by_key["Rp.Cp.E0"].rq4.totals_display() == "43*"
        assert by_key["Rp.Cf.E0"].rq4.totals_display() == "63*"
        assert by_key["Rf.Cp.E0"].rq4.totals_display() == "37*"
        assert by_key["Rf.Cf.E0"].rq4.totals_display() == "55*"
        # The corrupted root-cause case reduces RQ5 cells by one as well.
        assert by_key["Rp.Cp.E0"].rq5.attempted == 44
        assert by_key["Rp.Cp.E0"].rq5.usable == 43

    def test_rerun_resumes_without_new_requests(self, replica_dataset, tmp_path):
        conditions = enumerate_conditions(include_enrichment=False)
        first = run_experiment(
            replica_dataset, conditions, [MOCK], store_path=tmp_path / "v.jsonl"
        )
        store_size = len(VerdictStore(tmp_path / "v.jsonl"))
        second = run_experiment(
            replica_dataset, conditions, [MOCK], store_path=tmp_path / "v.jsonl"
        )
        assert len(VerdictStore(tmp_path / "v.jsonl")) == store_size
        for a, b in zip(first, second):
            assert a.rq3 == b.rq3
            assert a.rq4 == b.rq4
            assert a.rq5 == b.rq5

    def test_budget_guardrail_refuses_to_start(self, replica_dataset, tmp_path):
        with pytest.raises(BudgetExceededError):
            run_experiment(
                replica_dataset,
                enumerate_conditions(include_enrichment=False),
                [MOCK],
                store_path=tmp_path / "v.jsonl",
                request_budget=10,
            )
        assert not (tmp_path / "v.jsonl").exists()

    def test_results_round_trip(self, replica_dataset, tmp_path):
        cells = run_experiment(
            replica_dataset,
            [ExperimentCondition(Rp, Cp, EnrichmentLevel.NONE)],
            [MOCK],
            store_path=tmp_path / "v.jsonl",
        )
        write_results(cells, tmp_path / "results.jsonl", template_id="v1:x")
        loaded = read_results(tmp_path / "results.jsonl")
        assert len(loaded) == 1
        assert loaded[0].rq3 == cells[0].rq3
        assert loaded[0].rq4 == cells[0].rq4
        assert loaded[0].rq5 == cells[0].rq5
