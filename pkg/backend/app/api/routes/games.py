import numpy as np
from fastapi import APIRouter

from app.api.deps import SolverConfigDep, checked_game
from app.core.exceptions import InputError
from app.models import (
    EquilibriumReport,
    SolveRequest,
    ValidateRequest,
    ValidationReport,
    VerifyRequest,
)
from app.services.games import Game
from app.services.kantian import solve_mke, solve_nash, verify_mke
from app.services.shift import ShiftedGame
from app.services.validation import validate_game

router = APIRouter(prefix="/games", tags=["games"])


@router.post("/validate", response_model=ValidationReport)
def validate(body: ValidateRequest) -> ValidationReport:
    """
    Check a game against the structural assumptions.
    """
    return validate_game(Game.from_spec(body.game), body.samples, body.seed)


@router.post("/nash", response_model=EquilibriumReport)
def nash(body: SolveRequest, cfg: SolverConfigDep) -> EquilibriumReport:
    """
    Nash equilibrium by iterated best response.
    """
    return solve_nash(checked_game(body.game), body.x0, cfg)


@router.post("/mke", response_model=EquilibriumReport)
def mke(body: SolveRequest, cfg: SolverConfigDep) -> EquilibriumReport:
    """
    Strictly positive MKE by damped Newton.
    """
    game = checked_game(body.game)
    start = np.ones(game.n) if body.x0 is None else body.x0
    return solve_mke(game, start, cfg)


@router.post("/verify", response_model=EquilibriumReport)
def verify(body: VerifyRequest, cfg: SolverConfigDep) -> EquilibriumReport:
    """
    Check the MKE definition at a profile, in coordinates z = x - c when c is given.
    """
    game = checked_game(body.game)
    c = np.zeros(game.n) if body.c is None else np.asarray(body.c, dtype=float)
    x = np.asarray(body.profile, dtype=float)
    if x.shape != c.shape:
        raise InputError(f"Profile and c need {game.n} components each")
    return verify_mke(ShiftedGame.of(game, c), x - c, body.a_hi, cfg)
