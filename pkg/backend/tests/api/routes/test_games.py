import json

from fastapi.testclient import TestClient

from app.core.config import settings
from tests.utils.utils import fixture_path, spec_payload


def test_validate_game(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "samples": 10, "seed": 3}
    response = client.post(f"{settings.API_V1_STR}/games/validate", json=data)
    assert response.status_code == 200
    content = response.json()
    assert content["passed"] is True
    assert content["samples"] == 10
    assert content["seed"] == 3


def test_validate_reports_violations(client: TestClient) -> None:
    data = {"game": json.loads(fixture_path("mixed_sign").read_text())}
    response = client.post(f"{settings.API_V1_STR}/games/validate", json=data)
    assert response.status_code == 200
    content = response.json()
    assert content["passed"] is False
    assert "non-unidirectional" in {v["kind"] for v in content["violations"]}


def test_unknown_family_is_rejected(client: TestClient) -> None:
    game = spec_payload("qpg") | {"family": "Bertrand"}
    response = client.post(f"{settings.API_V1_STR}/games/validate", json={"game": game})
    assert response.status_code == 422


def test_missing_parameter_is_rejected(client: TestClient) -> None:
    game = spec_payload("qpg")
    game["params"].pop("gamma")
    response = client.post(f"{settings.API_V1_STR}/games/validate", json={"game": game})
    assert response.status_code == 422
    assert "gamma" in response.json()["detail"]


def test_nash(client: TestClient) -> None:
    response = client.post(f"{settings.API_V1_STR}/games/nash", json={"game": spec_payload("qpg")})
    assert response.status_code == 200
    content = response.json()
    assert content["kind"] == "Nash"
    assert content["verdict"] == "verified"
    assert all(abs(x - 1.0) <= 1e-8 for x in content["x"])


def test_mke(client: TestClient) -> None:
    response = client.post(
        f"{settings.API_V1_STR}/games/mke", json={"game": spec_payload("qpg"), "x0": [0.7, 2.1]}
    )
    assert response.status_code == 200
    content = response.json()
    assert content["kind"] == "MKE"
    assert content["verdict"] == "verified"
    assert all(abs(x - 1.5) <= 1e-6 for x in content["x"])


def test_mke_rejects_nonpositive_start(client: TestClient) -> None:
    response = client.post(
        f"{settings.API_V1_STR}/games/mke", json={"game": spec_payload("qpg"), "x0": [0.0, 1.0]}
    )
    assert response.status_code == 422


def test_mke_refuses_game_outside_the_class(client: TestClient) -> None:
    game = json.loads(fixture_path("mixed_sign").read_text())
    response = client.post(f"{settings.API_V1_STR}/games/mke", json={"game": game})
    assert response.status_code == 422
    assert "non-unidirectional" in response.json()["detail"]["violations"]


def test_verify_in_shifted_coordinates(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "profile": [1.25, 2.0], "c": [0.625, 1.6875]}
    response = client.post(f"{settings.API_V1_STR}/games/verify", json=data)
    assert response.status_code == 200
    content = response.json()
    assert content["verdict"] == "verified"
    assert content["x"] == [0.625, 0.3125]


def test_verify_failure_is_a_report(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "profile": [1.0, 1.0]}
    response = client.post(f"{settings.API_V1_STR}/games/verify", json=data)
    assert response.status_code == 200
    assert response.json()["verdict"] == "failed"


def test_verify_checks_widths(client: TestClient) -> None:
    data = {"game": spec_payload("qpg"), "profile": [1.0, 1.0, 1.0]}
    response = client.post(f"{settings.API_V1_STR}/games/verify", json=data)
    assert response.status_code == 422
