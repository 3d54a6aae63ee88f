import pytest
from fastapi.testclient import TestClient

from app.core.config import settings
from tests.utils.utils import spec_payload


def test_realize_by_weights(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "weights": [2.0, 1.0], "theta": 0.5}
    response = client.post(f"{settings.API_V1_STR}/realize/", json=data)
    assert response.status_code == 200
    content = response.json()
    assert content["c"] == pytest.approx([0.625, 1.6875], abs=1e-6)
    assert content["z_star"] == pytest.approx([0.625, 0.3125], abs=1e-6)
    assert content["verification"]["verdict"] == "verified"


def test_realize_by_criterion(client: TestClient) -> None:
    data = {"game": spec_payload("cournot"), "criterion": {"kind": "maximin"}}
    response = client.post(f"{settings.API_V1_STR}/realize/", json=data)
    assert response.status_code == 200
    content = response.json()
    assert content["x_p"][0] == pytest.approx(content["x_p"][1], abs=1e-6)
    assert content["verification"]["verdict"] == "verified"


def test_realize_rejects_inefficient_point(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "point": [1.0, 1.0]}
    response = client.post(f"{settings.API_V1_STR}/realize/", json=data)
    assert response.status_code == 400


def test_realize_needs_one_target(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "weights": [1.0, 1.0], "point": [1.5, 1.5]}
    response = client.post(f"{settings.API_V1_STR}/realize/", json=data)
    assert response.status_code == 422


def test_realize_theta_range(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "weights": [1.0, 1.0], "theta": 1.0}
    response = client.post(f"{settings.API_V1_STR}/realize/", json=data)
    assert response.status_code == 422


def test_realize_sweep(client: TestClient) -> None:
    data = {"game": spec_payload("commons"), "points": 9}
    response = client.post(f"{settings.API_V1_STR}/realize/sweep", json=data)
    assert response.status_code == 200
    content = response.json()
    assert content["failures"] == []
    assert len(content["plans"]) == content["total"]
    assert all(plan["verification"]["verdict"] == "verified" for plan in content["plans"])
