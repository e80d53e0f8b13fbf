# tests/conftest.py
import os

# Must be set before app.db builds its engine.
os.environ.setdefault("NEUROEVO_DATABASE_URL", "sqlite://")

import numpy as np
import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from app.core.config import Settings
from app.data.datasets import Dataset
from app.data.problems import DatasetKind
from app.db import Base, get_db
from app.main import app
from app.net.topology import OutputMode, ParamVector, Topology
from app.services.experiment_service import ExperimentService, get_experiment_service
from app.services.stats_service import StatsService, get_stats_service


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the long reproduction checks",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running reproduction check (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# -----------------------------------------------------------------------------
# Networks and data
# -----------------------------------------------------------------------------


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_topology():
    """Two hidden layers so that outgoing weights are part of the beta blocks."""
    return Topology((2, 3, 4, 2), OutputMode.CLASSIFICATION)


@pytest.fixture
def regression_topology():
    return Topology((1, 5, 1))


@pytest.fixture
def random_params(small_topology, rng):
    return ParamVector.random(small_topology, rng)


@pytest.fixture
def regression_data(rng):
    x = rng.uniform(-1.0, 1.0, size=(40, 1))
    return Dataset(x, np.sin(3.0 * x), DatasetKind.REGRESSION)


@pytest.fixture
def classification_data(rng):
    x = rng.uniform(-1.0, 1.0, size=(60, 2))
    labels = (x[:, 0] * x[:, 1] > 0).astype(int)
    targets = np.eye(2)[labels]
    return Dataset(x, targets, DatasetKind.CLASSIFICATION, 2)


# -----------------------------------------------------------------------------
# Settings, registry and API
# -----------------------------------------------------------------------------


@pytest.fixture
def test_settings(tmp_path):
    return Settings(
        output_dir=str(tmp_path / "runs"),
        database_url="sqlite://",
        brute_force_cap=10_000,
        workers=1,
        log_level="DEBUG",
        significance_level=0.05,
    )


@pytest.fixture
def db_session():
    """In-memory SQLite session shared across threads."""
    engine = create_engine(
        "sqlite://",
        connect_args={"check_same_thread": False},
        poolclass=StaticPool,
    )
    import app.models  # noqa: F401

    Base.metadata.create_all(bind=engine)
    Session = sessionmaker(bind=engine, autoflush=False, autocommit=False)
    session = Session()
    try:
        yield session
    finally:
        session.close()
        engine.dispose()


@pytest.fixture
def test_client(test_settings, db_session):
    """
    FastAPI TestClient with the services bound to a temporary output
    directory and the registry bound to the in-memory session.
    """

    def override_get_db():
        yield db_session

    app.dependency_overrides[get_db] = override_get_db
    app.dependency_overrides[get_experiment_service] = lambda: ExperimentService(test_settings)
    app.dependency_overrides[get_stats_service] = lambda: StatsService(test_settings)
    with TestClient(app) as client:
        yield client
    app.dependency_overrides.clear()
