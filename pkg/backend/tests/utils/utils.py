import json
from pathlib import Path
from typing import Any

import numpy as np

from app.models import GameFamily, GameSpec, ParetoPoint
from app.services.games import SPECS_DIR, Game, load_game

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


def spec_path(name: str) -> Path:
    return SPECS_DIR / f"{name}.json"


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / f"{name}.json"


def bundled_game(name: str) -> Game:
    return load_game(spec_path(name))


def spec_payload(name: str) -> dict[str, Any]:
    payload: dict[str, Any] = json.loads(spec_path(name).read_text())
    return payload


def quadratic_game(
    a: float | list[float] = 1.0,
    b: float | list[float] = 1.0,
    gamma: float = 0.5,
    n: int = 2,
) -> Game:
    spec = GameSpec(
        n=n,
        family=GameFamily.QUADRATIC_PUBLIC_GOODS,
        params={"a": a, "b": b, "gamma": gamma},
        externality_sign=1 if gamma >= 0 else -1,
    )
    return Game.from_spec(spec)


def random_interior_profiles(
    n: int, count: int, seed: int = 0, box: tuple[float, float] = (0.2, 2.5)
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(*box, size=(count, n))


def as_point(game: Game, x: list[float]) -> ParetoPoint:
    """Wrap a profile as a ParetoPoint without certifying it."""
    return ParetoPoint(
        x=x,
        m=[1.0 / game.n] * game.n,
        payoffs=game.payoffs(np.array(x)).tolist(),
        cert_residual=0.0,
    )
