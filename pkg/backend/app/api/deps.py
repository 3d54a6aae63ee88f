from typing import Annotated

from fastapi import Depends, HTTPException

from app.core.config import settings
from app.models import GameSpec, SolverConfig
from app.services.games import Game
from app.services.validation import validate_game


def get_solver_config() -> SolverConfig:
    return SolverConfig()


SolverConfigDep = Annotated[SolverConfig, Depends(get_solver_config)]


def checked_game(spec: GameSpec) -> Game:
    """Build the game and refuse it when it fails validation."""
    game = Game.from_spec(spec)
    report = validate_game(game, settings.VALIDATION_SAMPLES, settings.SEED)
    if not report.passed:
        raise HTTPException(
            status_code=422,
            detail={
                "message": "The game failed validation",
                "violations": sorted({v.kind.value for v in report.violations}),
            },
        )
    return game
