import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from app.core.config import settings
from app.core.exceptions import (
    InputError,
    KantianError,
    NoInteriorShiftDirectionError,
    NotEfficientError,
    ShiftVerificationError,
    VerticalTangentError,
)
from app.models import (
    BatchRealization,
    ParetoPoint,
    ReferenceOutcome,
    RowFailure,
    ShiftPlan,
    SolverConfig,
)
from app.services.games import PayoffModel, as_profile
from app.services.kantian import mke_residual, residual_scale, solve_mke, verify_mke
from app.services.pareto import certify_efficiency
from app.services.solve import nullspace

logger = logging.getLogger(__name__)

# Componentwise margin for a strictly positive direction in a degenerate nullspace
DIRECTION_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class AffineGame:
    """The base game seen through z = (x - offset) / scale."""

    base: PayoffModel
    scale: np.ndarray
    offset: np.ndarray

    @property
    def n(self) -> int:
        return self.base.n

    def to_base(self, Z: np.ndarray) -> np.ndarray:
        return np.asarray(Z, dtype=float) * self.scale + self.offset

    def from_base(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.offset) / self.scale

    def payoffs(self, Z: np.ndarray) -> np.ndarray:
        return self.base.payoffs(self.to_base(Z))

    def gradient(self, z: np.ndarray) -> np.ndarray:
        return self.base.gradient(self.to_base(z)) * self.scale[None, :]


class ShiftedGame(AffineGame):
    """Unit-scale reparametrization z = x - c."""

    @classmethod
    def of(cls, base: PayoffModel, c: np.ndarray | list[float]) -> "ShiftedGame":
        c_arr = np.asarray(c, dtype=float)
        if c_arr.shape != (base.n,):
            raise InputError(f"Reference vector needs {base.n} components")
        return cls(base=base, scale=np.ones(base.n), offset=c_arr)

    @property
    def c(self) -> np.ndarray:
        return self.offset


def reparametrize_affine(
    game: PayoffModel,
    scale: np.ndarray | list[float],
    offset: np.ndarray | list[float] | None = None,
) -> AffineGame:
    scale_arr = np.asarray(scale, dtype=float)
    offset_arr = np.zeros(game.n) if offset is None else np.asarray(offset, dtype=float)
    if scale_arr.shape != (game.n,) or offset_arr.shape != (game.n,):
        raise InputError(f"scale and offset need {game.n} components")
    if np.any(scale_arr <= 0):
        raise InputError("Reparametrization scales must be positive")
    if np.any(offset_arr < 0):
        raise InputError("Reparametrization offsets must be nonnegative")
    if np.all(scale_arr == 1.0):
        return ShiftedGame.of(game, offset_arr)
    return AffineGame(base=game, scale=scale_arr, offset=offset_arr)


def _positive_combination(basis: list[np.ndarray]) -> np.ndarray | None:
    """Strictly positive vector in span(basis), by a small LP; None if none exists."""
    B = np.vstack(basis)  # (k, n)
    k, n = B.shape
    # variables: coefficients alpha (k, free in [-1, 1]) and margin t; maximize t
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-B.T, np.ones((n, 1))])  # t - (B^T alpha)_i <= 0
    b_ub = np.zeros(n)
    bounds = [(-1.0, 1.0)] * k + [(None, 1.0)]
    result = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not result.success or -result.fun <= DIRECTION_MARGIN:
        return None
    v: np.ndarray = B.T @ result.x[:k]
    return v


def tangent_direction(
    game: PayoffModel, p: ParetoPoint, rank_tol: float | None = None
) -> np.ndarray:
    """Unit vector v > 0 orthogonal to every gradient at the Pareto point."""
    rank_tol = settings.RANK_TOL if rank_tol is None else rank_tol
    x_p = as_profile(game, p.x)
    basis = nullspace(game.gradient(x_p), rank_tol)
    if not basis:
        raise NotEfficientError(
            "Gradients have full rank: no common tangent direction", x_p
        )
    if len(basis) == 1:
        v = basis[0]
        if np.all(v <= 0):
            v = -v
        if not np.all(v > 0):
            raise NoInteriorShiftDirectionError(
                f"Common tangent {v.tolist()} has mixed signs at {x_p.tolist()}",
                x_p,
                basis,
            )
    else:
        combo = _positive_combination(basis)
        if combo is None:
            raise NoInteriorShiftDirectionError(
                f"No strictly positive direction in the {len(basis)}-dimensional "
                f"tangent space at {x_p.tolist()}",
                x_p,
                basis,
            )
        v = combo
    unit: np.ndarray = v / np.linalg.norm(v)
    return unit


def tangent_line_2d(game: PayoffModel, p: ParetoPoint) -> tuple[float, float]:
    """The common tangent as x_1 = slope * x_2 + intercept."""
    if game.n != 2:
        raise InputError("tangent_line_2d applies to two-player games only")
    x_p = as_profile(game, p.x)
    u11, u12 = game.gradient(x_p)[0]
    if abs(u11) <= np.finfo(float).eps * max(1.0, abs(u12)):
        raise VerticalTangentError(
            f"U_1,x_1 vanishes at {x_p.tolist()}: tangent is vertical in these coordinates"
        )
    ratio = float(u12 / u11)
    return -ratio, float(x_p[0] + ratio * x_p[1])


def build_shift(
    game: PayoffModel,
    p: ParetoPoint,
    theta: float | None = None,
    cfg: SolverConfig | None = None,
    a_hi: float | None = None,
) -> ShiftPlan:
    """Reference vector c on the common tangent that makes p an MKE in z = x - c."""
    cfg = cfg or SolverConfig()
    theta = settings.THETA if theta is None else theta
    if not 0.0 < theta < 1.0:
        raise InputError(f"theta must lie in (0, 1), got {theta}")
    x_p = as_profile(game, p.x)
    if np.any(x_p <= 0):
        raise InputError("build_shift needs an interior Pareto point")
    v = tangent_direction(game, p, cfg.rank_tol)
    G = game.gradient(x_p)
    residual = mke_residual(game, x_p)
    through_origin = float(np.abs(residual).max()) <= cfg.residual_tol * residual_scale(G, x_p)
    if through_origin:
        eps = eps_max = float(np.linalg.norm(x_p))
        c = np.zeros(game.n)
        z_star = x_p.copy()
        v = x_p / eps
    else:
        eps_max = float(np.min(x_p / v))
        eps = theta * eps_max
        c = np.maximum(x_p - eps * v, 0.0)
        z_star = x_p - c
    exactness = G @ (x_p - c)
    residual_max = float(np.abs(exactness).max()) / max(
        np.finfo(float).tiny,
        float(np.linalg.norm(G, axis=1).max()) * float(np.linalg.norm(x_p - c)),
    )
    verification = verify_mke(ShiftedGame.of(game, c), z_star, a_hi, cfg)
    plan = ShiftPlan(
        x_p=x_p.tolist(),
        v=v.tolist(),
        eps=eps,
        eps_max=eps_max,
        theta=theta,
        c=c.tolist(),
        z_star=z_star.tolist(),
        residual_max=residual_max,
        through_origin=through_origin,
        verification=verification,
    )
    if not verification.verified:
        raise ShiftVerificationError(
            f"Shifted profile failed MKE verification (residual {verification.max_residual:.3g}, "
            f"argmax {verification.oracle_argmax})",
            plan,
        )
    logger.info(
        "Shift plan for x_p=%s: c=%s (theta=%.3f, through origin: %s)",
        np.round(x_p, 9).tolist(),
        np.round(c, 9).tolist(),
        theta,
        through_origin,
    )
    return plan


def shift_frontier(
    game: PayoffModel,
    points: list[ParetoPoint],
    theta: float | None = None,
    cfg: SolverConfig | None = None,
) -> BatchRealization:
    """build_shift per frontier point; failures are captured per row."""
    cfg = cfg or SolverConfig()

    def attempt(item: tuple[int, ParetoPoint]) -> ShiftPlan | RowFailure:
        index, point = item
        try:
            return build_shift(game, point, theta, cfg)
        except KantianError as exc:
            logger.warning("Row %d failed to realize: %s", index, exc)
            return RowFailure(index=index, x_p=point.x, error=str(exc))

    results = [attempt(item) for item in enumerate(points)]
    return BatchRealization(
        plans=[r for r in results if isinstance(r, ShiftPlan)],
        failures=[r for r in results if isinstance(r, RowFailure)],
        total=len(points),
    )


def admissible_references(
    game: PayoffModel,
    p: ParetoPoint,
    k: int,
    cfg: SolverConfig | None = None,
) -> list[np.ndarray]:
    """Reference vectors c(theta_j), theta_j = j/(k+1), all realizing the same point."""
    cfg = cfg or SolverConfig()
    if k < 1:
        raise InputError("Need at least one reference vector")
    x_p = as_profile(game, p.x)
    v = tangent_direction(game, p, cfg.rank_tol)
    eps_max = float(np.min(x_p / v))
    thetas = np.arange(1, k + 1) / (k + 1)
    return [np.maximum(x_p - theta * eps_max * v, 0.0) for theta in thetas]


def mke_for_reference(
    game: PayoffModel,
    c: np.ndarray | list[float],
    x0: np.ndarray | list[float] | None = None,
    cfg: SolverConfig | None = None,
) -> ReferenceOutcome:
    """Forward direction: the MKE reached from an agreed reference vector c."""
    cfg = cfg or SolverConfig()
    shifted = ShiftedGame.of(game, c)
    if np.any(shifted.c < 0):
        raise InputError("Reference vector must be nonnegative")
    start = np.ones(game.n) if x0 is None else x0
    report = solve_mke(shifted, start, cfg)
    z_star = np.asarray(report.x)
    x = shifted.to_base(z_star)
    return ReferenceOutcome(
        c=shifted.c.tolist(),
        z_star=z_star.tolist(),
        x=x.tolist(),
        payoffs=report.payoffs,
        verification=report,
        certification=certify_efficiency(game, x, cfg.cert_tol, cfg),
    )
