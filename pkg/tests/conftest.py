from __future__ import annotations

import pytest

from qflake.corpus.models import Snapshot
from qflake.fixtures import build_replica_snapshot_and_dataset
from qflake.store.dataset import Dataset


@pytest.fixture(scope="session")
def replica() -> tuple[Snapshot, Dataset]:
    return build_replica_snapshot_and_dataset()


@pytest.fixture(scope="session")
def replica_snapshot(replica) -> Snapshot:
    return replica[0]


@pytest.fixture(scope="session")
def replica_dataset(replica) -> Dataset:
    return replica[1]


@pytest.fixture(scope="session")
def replica_dataset_dir(replica_dataset, tmp_path_factory):
    """The replica dataset persisted once for tests that go through the CLI."""
    from qflake.store.dataset import persist_dataset

    root = tmp_path_factory.mktemp("replica-dataset")
    persist_dataset(replica_dataset, root)
    return root
