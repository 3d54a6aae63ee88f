from collections.abc import Generator

import pytest
from fastapi.testclient import TestClient
from typer.testing import CliRunner

from app.core.config import settings
from app.main import app
from app.models import SolverConfig
from app.services.games import Game
from tests.utils.utils import bundled_game


@pytest.fixture(autouse=True)
def coarse_oracle_grid(monkeypatch: pytest.MonkeyPatch) -> None:
    # one cell is 1e-4 on [0, 3], still ten times finer than the argmax tolerance
    monkeypatch.setattr(settings, "GRID_POINTS", 30001)


@pytest.fixture
def cfg() -> SolverConfig:
    return SolverConfig()


@pytest.fixture(scope="session")
def qpg() -> Game:
    return bundled_game("qpg")


@pytest.fixture(scope="session")
def cournot() -> Game:
    return bundled_game("cournot")


@pytest.fixture(scope="session")
def cournot_linear() -> Game:
    return bundled_game("cournot_linear")


@pytest.fixture(scope="session")
def commons() -> Game:
    return bundled_game("commons")


@pytest.fixture(scope="module")
def client() -> Generator[TestClient, None, None]:
    with TestClient(app) as c:
        yield c


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()
