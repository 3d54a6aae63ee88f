from fastapi import APIRouter

from app.api.deps import SolverConfigDep, checked_game
from app.models import FrontierRequest, FrontierSweep
from app.services.pareto import sweep_frontier

router = APIRouter(prefix="/frontier", tags=["frontier"])


@router.post("/", response_model=FrontierSweep)
def sweep(body: FrontierRequest, cfg: SolverConfigDep) -> FrontierSweep:
    """
    Sample the interior Pareto frontier.
    """
    return sweep_frontier(checked_game(body.game), body.points, cfg)
