from fastapi import APIRouter

from app.api.deps import SolverConfigDep, checked_game
from app.models import BatchRealization, RealizeRequest, ShiftPlan, SweepRealizeRequest
from app.services.pareto import sweep_frontier
from app.services.select import resolve_target
from app.services.shift import build_shift, shift_frontier

router = APIRouter(prefix="/realize", tags=["realize"])


@router.post("/", response_model=ShiftPlan)
def realize(body: RealizeRequest, cfg: SolverConfigDep) -> ShiftPlan:
    """
    Reference vector c that makes the chosen Pareto point an MKE.
    """
    game = checked_game(body.game)
    target = resolve_target(
        game,
        criterion=body.criterion,
        weights=body.weights,
        point=body.point,
        k=body.points,
        cfg=cfg,
    )
    return build_shift(game, target, body.theta, cfg)


@router.post("/sweep", response_model=BatchRealization)
def realize_sweep(body: SweepRealizeRequest, cfg: SolverConfigDep) -> BatchRealization:
    """
    Build and verify a shift plan for every swept frontier point.
    """
    game = checked_game(body.game)
    sweep = sweep_frontier(game, body.points, cfg)
    return shift_frontier(game, sweep.points, body.theta, cfg)
