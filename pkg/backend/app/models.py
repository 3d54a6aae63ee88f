from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings

ParamValue = float | list[float] | list[list[float]]


# Game specs

class GameFamily(str, Enum):
    QUADRATIC_PUBLIC_GOODS = "QuadraticPublicGoods"
    LINEAR_COURNOT = "LinearCournot"
    COMMONS = "Commons"
    CUSTOM_QUADRATIC = "CustomQuadratic"


# On-disk / over-the-wire form of a game; app.services.games builds the in-memory Game
class GameSpec(BaseModel):
    n: int = Field(ge=2, le=settings.MAX_PLAYERS)
    family: GameFamily
    params: dict[str, ParamValue]
    externality_sign: Literal[1, -1]
    name: str | None = Field(default=None, max_length=255)


class ViolationKind(str, Enum):
    OWN_CONCAVITY = "own-concavity"
    RAY_CONCAVITY = "ray-concavity"
    NON_UNIDIRECTIONAL = "non-unidirectional"
    GRADIENT_MISMATCH = "gradient-mismatch"
    TANGENT_CONCAVITY = "tangent-concavity"


class Violation(BaseModel):
    kind: ViolationKind
    player: int
    profile: list[float]
    value: float
    detail: str


class ValidationReport(BaseModel):
    passed: bool
    samples: int
    seed: int
    externality_sign: int
    violations: list[Violation] = []
    # Informational findings that do not take the game out of the supported class
    notes: list[str] = []


# Solver configuration

class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol_grad: float = Field(default_factory=lambda: settings.TOL_GRAD, gt=0)
    tol_step: float = Field(default_factory=lambda: settings.TOL_STEP, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.MAX_ITER, ge=1)
    grid_points: int = Field(default_factory=lambda: settings.GRID_POINTS, ge=3)
    seed: int = Field(default_factory=lambda: settings.SEED)
    rank_tol: float = Field(default_factory=lambda: settings.RANK_TOL, gt=0)
    fd_step: float = Field(default_factory=lambda: settings.FD_STEP, gt=0)
    residual_tol: float = Field(default_factory=lambda: settings.RESIDUAL_TOL, gt=0)
    cert_tol: float = Field(default_factory=lambda: settings.CERT_TOL, gt=0)
    multiplier_floor: float = Field(
        default_factory=lambda: settings.MULTIPLIER_FLOOR, gt=0
    )
    argmax_delta: float = Field(default_factory=lambda: settings.ARGMAX_DELTA, gt=0)
    dedup_spacing: float = Field(default_factory=lambda: settings.DEDUP_SPACING, gt=0)


# Pareto frontier

class ParetoPoint(BaseModel):
    x: list[float]
    m: list[float]
    payoffs: list[float]
    cert_residual: float


class Certification(BaseModel):
    accepted: bool
    m: list[float]
    residual: float
    reason: str | None = None


class FrontierSweep(BaseModel):
    points: list[ParetoPoint]
    requested: int
    spread: float
    boundary_rejections: int = 0
    duplicates: int = 0


# Equilibria

class EquilibriumKind(str, Enum):
    MKE = "MKE"
    NASH = "Nash"


class Verdict(str, Enum):
    VERIFIED = "verified"
    FAILED = "failed"


class EquilibriumReport(BaseModel):
    kind: EquilibriumKind
    x: list[float]
    payoffs: list[float]
    residuals: list[float]
    oracle_argmax: list[float]
    verdict: Verdict
    max_residual: float
    iterations: int = 0
    a_hi: float | None = None
    delta: float | None = None

    @property
    def verified(self) -> bool:
        return self.verdict == Verdict.VERIFIED


class NashMKEComparison(BaseModel):
    nash: EquilibriumReport
    mke: EquilibriumReport
    mke_dominates: bool


class MKEScan(BaseModel):
    roots: list[EquilibriumReport]
    starts: int
    degenerate: int = 0
    nonconverged: int = 0


# Coordinate shifts

class ShiftPlan(BaseModel):
    x_p: list[float]
    v: list[float]
    eps: float
    eps_max: float
    theta: float
    c: list[float]
    z_star: list[float]
    residual_max: float
    through_origin: bool = False
    verification: EquilibriumReport

    @property
    def verified(self) -> bool:
        return self.verification.verified


class ReferenceOutcome(BaseModel):
    c: list[float]
    z_star: list[float]
    x: list[float]
    payoffs: list[float]
    verification: EquilibriumReport
    certification: Certification


class RowFailure(BaseModel):
    index: int
    x_p: list[float]
    error: str


class BatchRealization(BaseModel):
    plans: list[ShiftPlan]
    failures: list[RowFailure] = []
    total: int

    @property
    def verified_count(self) -> int:
        return sum(plan.verified for plan in self.plans)

    @property
    def pass_rate(self) -> float:
        return self.verified_count / self.total if self.total else 0.0


# Normative selection

class CriterionKind(str, Enum):
    UTILITARIAN = "utilitarian"
    MAXIMIN = "maximin"
    NASH_BARGAINING = "nash-bargaining"
    KALAI_SMORODINSKY = "kalai-smorodinsky"


class Criterion(BaseModel):
    kind: CriterionKind
    # Payoff vector; defaults to the Nash equilibrium payoffs of the game
    disagreement: list[float] | None = None
    disagreement_profile: list[float] | None = None


class Selection(BaseModel):
    criterion: CriterionKind
    point: ParetoPoint
    objective: float
    disagreement: list[float] | None = None
    ideal: list[float] | None = None


# Request bodies for the HTTP surface

class ValidateRequest(BaseModel):
    game: GameSpec
    samples: int = Field(default_factory=lambda: settings.VALIDATION_SAMPLES, ge=1)
    seed: int = Field(default_factory=lambda: settings.SEED)


class SolveRequest(BaseModel):
    game: GameSpec
    x0: list[float] | None = None


class VerifyRequest(BaseModel):
    game: GameSpec
    profile: list[float]
    c: list[float] | None = None
    a_hi: float = Field(default_factory=lambda: settings.A_HI, gt=1)


class FrontierRequest(BaseModel):
    game: GameSpec
    points: int = Field(default=11, ge=1, le=10_000)


class RealizeRequest(BaseModel):
    game: GameSpec
    criterion: Criterion | None = None
    weights: list[float] | None = None
    point: list[float] | None = None
    theta: float = Field(default_factory=lambda: settings.THETA, gt=0, lt=1)
    points: int = Field(default=25, ge=2)


class SweepRealizeRequest(BaseModel):
    game: GameSpec
    points: int = Field(default=25, ge=1, le=10_000)
    theta: float = Field(default_factory=lambda: settings.THETA, gt=0, lt=1)


# Resolved command-line configuration, echoed into every artifact

class RunConfig(BaseModel):
    command: str
    game_path: str
    out: str | None = None
    seed: int
    tol: float | None = None
    points: int | None = None
    theta: float | None = None
    a_hi: float | None = None
    criterion: CriterionKind | None = None
    weights: list[float] | None = None
    point: list[float] | None = None
    c: list[float] | None = None
