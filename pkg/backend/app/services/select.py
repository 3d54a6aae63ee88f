"""Normative selection of the frontier point to be realized."""

import logging
from collections.abc import Callable

import numpy as np
from scipy.optimize import brentq

from app.core.exceptions import EmptyAdmissibleSetError, InputError, KantianError, NotEfficientError
from app.models import (
    Criterion,
    CriterionKind,
    ParetoPoint,
    Selection,
    SolverConfig,
)
from app.services.games import PayoffModel, as_profile
from app.services.kantian import solve_nash
from app.services.pareto import certify_efficiency, pareto_point, scalarize, sweep_frontier
from app.services.solve import golden_section

logger = logging.getLogger(__name__)

# Weight-space resolution of the local refinement
WEIGHT_TOL = 1e-9
COMPASS_STEP = 0.1
COMPASS_MAX_ITER = 200
TIE_RTOL = 1e-12

Score = Callable[[np.ndarray], float]


def _disagreement(game: PayoffModel, crit: Criterion, cfg: SolverConfig) -> np.ndarray:
    if crit.disagreement is not None:
        d = np.asarray(crit.disagreement, dtype=float)
        if d.shape != (game.n,):
            raise InputError(f"Disagreement payoffs need {game.n} components")
        return d
    if crit.disagreement_profile is not None:
        return np.asarray(game.payoffs(as_profile(game, crit.disagreement_profile)))
    return np.asarray(solve_nash(game, None, cfg).payoffs)


def _maximin(u: np.ndarray) -> float:
    return float(np.min(u))


def _gain_score(kind: CriterionKind, d: np.ndarray, ideal: np.ndarray) -> Score:
    """Log Nash product, or the smallest normalized gain for Kalai-Smorodinsky."""

    def nash_product(u: np.ndarray) -> float:
        gains = u - d
        return float(np.sum(np.log(gains))) if np.all(gains > 0) else -np.inf

    def normalized_gain(u: np.ndarray) -> float:
        return float(np.min((u - d) / (ideal - d))) if np.all(u > d) else -np.inf

    return nash_product if kind is CriterionKind.NASH_BARGAINING else normalized_gain


def _best_index(scores: np.ndarray, weights: np.ndarray) -> int:
    """Highest score; near-ties go to the lexicographically smallest weight vector."""
    best = float(np.max(scores))
    tied = np.flatnonzero(scores >= best - TIE_RTOL * max(1.0, abs(best)))
    return int(min(tied, key=lambda j: tuple(weights[j])))


def _scalarize_or_none(
    game: PayoffModel, weights: np.ndarray, cfg: SolverConfig
) -> ParetoPoint | None:
    try:
        return scalarize(game, weights, cfg)
    except KantianError as exc:
        logger.debug("Refinement point at m=%s rejected: %s", weights.tolist(), exc)
        return None


def _refine_pair(
    game: PayoffModel,
    points: list[ParetoPoint],
    j: int,
    score: Score,
    cfg: SolverConfig,
) -> ParetoPoint:
    """Golden section on m_1 between the sweep neighbours of point j (n = 2)."""
    lo = points[max(j - 1, 0)].m[0]
    hi = points[min(j + 1, len(points) - 1)].m[0]
    if not lo < hi:
        return points[j]

    def along(m1: float) -> float:
        point = _scalarize_or_none(game, np.array([m1, 1.0 - m1]), cfg)
        return -np.inf if point is None else score(np.asarray(point.payoffs))

    m1 = golden_section(along, lo, hi, WEIGHT_TOL)
    refined = _scalarize_or_none(game, np.array([m1, 1.0 - m1]), cfg)
    if refined is None or score(np.asarray(refined.payoffs)) < score(np.asarray(points[j].payoffs)):
        return points[j]
    return refined


def _compass_search(
    game: PayoffModel, start: ParetoPoint, score: Score, cfg: SolverConfig
) -> ParetoPoint:
    """Pairwise weight transfers with a halving step (n > 2)."""
    n = game.n
    best = start
    best_score = score(np.asarray(start.payoffs))
    step = COMPASS_STEP
    moves = [(i, j) for i in range(n) for j in range(n) if i != j]
    for _ in range(COMPASS_MAX_ITER):
        if step < WEIGHT_TOL:
            break
        improved = False
        for i, j in moves:
            w = np.asarray(best.m, dtype=float).copy()
            w[i] += step
            w[j] -= step
            if w[j] < cfg.multiplier_floor:
                continue
            candidate = _scalarize_or_none(game, w, cfg)
            if candidate is None:
                continue
            value = score(np.asarray(candidate.payoffs))
            if value > best_score:
                best, best_score, improved = candidate, value, True
                break
        if not improved:
            step *= 0.5
    return best


def _kalai_smorodinsky_pair(
    game: PayoffModel,
    points: list[ParetoPoint],
    d: np.ndarray,
    ideal: np.ndarray,
    cfg: SolverConfig,
) -> ParetoPoint:
    """Root of the normalized gain gap in m_1 (n = 2)."""

    def gap(payoffs: np.ndarray) -> float:
        r = (payoffs - d) / (ideal - d)
        return float(r[0] - r[1])

    gaps = np.array([gap(np.asarray(p.payoffs)) for p in points])
    crossing = np.flatnonzero(gaps >= 0)
    if crossing.size == 0:
        return points[-1]
    j = int(crossing[0])
    if j == 0 or gaps[j] == 0:
        return points[j]
    lo, hi = points[j - 1].m[0], points[j].m[0]

    def along(m1: float) -> float:
        return gap(np.asarray(scalarize(game, [m1, 1.0 - m1], cfg).payoffs))

    m1 = brentq(along, lo, hi, xtol=WEIGHT_TOL)
    return scalarize(game, [m1, 1.0 - m1], cfg)


def select_point(
    game: PayoffModel,
    crit: Criterion,
    k: int,
    cfg: SolverConfig | None = None,
) -> Selection:
    """Pick a frontier point by a welfare or bargaining criterion.

    Utilitarian is solved exactly; the other criteria scan a k-point sweep and
    refine locally in weight space.
    """
    cfg = cfg or SolverConfig()
    if k < 2:
        raise InputError("Selection needs at least two frontier samples")

    if crit.kind is CriterionKind.UTILITARIAN:
        point = scalarize(game, np.full(game.n, 1.0 / game.n), cfg)
        return _finish(game, crit, point, float(np.sum(point.payoffs)), cfg)

    sweep = sweep_frontier(game, k, cfg)
    points = sorted(sweep.points, key=lambda p: tuple(p.m))
    if not points:
        raise NotEfficientError("Frontier sweep produced no interior points", np.zeros(game.n))
    payoffs = np.array([p.payoffs for p in points])
    weights = np.array([p.m for p in points])

    d: np.ndarray | None = None
    ideal: np.ndarray | None = None
    if crit.kind is CriterionKind.MAXIMIN:
        score = _maximin
    else:
        d = _disagreement(game, crit, cfg)
        admissible = np.all(payoffs > d, axis=1)
        if not np.any(admissible):
            raise EmptyAdmissibleSetError(
                f"No sampled frontier point strictly dominates the disagreement payoffs {d.tolist()}"
            )
        ideal = payoffs[admissible].max(axis=0)
        score = _gain_score(crit.kind, d, ideal)

    scores = np.array([score(u) for u in payoffs])
    j = _best_index(scores, weights)
    if game.n == 2 and d is not None and ideal is not None and (
        crit.kind is CriterionKind.KALAI_SMORODINSKY
    ):
        admissible_points = [p for p, ok in zip(points, np.all(payoffs > d, axis=1)) if ok]
        point = _kalai_smorodinsky_pair(game, admissible_points, d, ideal, cfg)
    elif game.n == 2:
        point = _refine_pair(game, points, j, score, cfg)
    else:
        point = _compass_search(game, points[j], score, cfg)

    if d is not None and not np.all(np.asarray(point.payoffs) > d):
        raise EmptyAdmissibleSetError(
            f"Selected payoffs {point.payoffs} do not dominate the disagreement point {d.tolist()}"
        )
    value = score(np.asarray(point.payoffs))
    if crit.kind is CriterionKind.NASH_BARGAINING:
        value = float(np.exp(value))
    return _finish(game, crit, point, value, cfg, d, ideal)


def _finish(
    game: PayoffModel,
    crit: Criterion,
    point: ParetoPoint,
    objective: float,
    cfg: SolverConfig,
    d: np.ndarray | None = None,
    ideal: np.ndarray | None = None,
) -> Selection:
    cert = certify_efficiency(game, point.x, cfg.cert_tol, cfg)
    if not cert.accepted:
        raise NotEfficientError(
            f"Selected point failed re-certification: {cert.reason}",
            np.asarray(point.x),
            cert.residual,
        )
    logger.info(
        "%s selection: x=%s, objective %.12g",
        crit.kind.value,
        np.round(point.x, 9).tolist(),
        objective,
    )
    return Selection(
        criterion=crit.kind,
        point=point,
        objective=objective,
        disagreement=None if d is None else d.tolist(),
        ideal=None if ideal is None else ideal.tolist(),
    )


def resolve_target(
    game: PayoffModel,
    *,
    criterion: Criterion | None = None,
    weights: list[float] | None = None,
    point: list[float] | None = None,
    k: int = 25,
    cfg: SolverConfig | None = None,
) -> ParetoPoint:
    """The frontier point named by exactly one of criterion, weights or point."""
    cfg = cfg or SolverConfig()
    given = [v for v in (criterion, weights, point) if v is not None]
    if len(given) != 1:
        raise InputError("Give exactly one of criterion, weights or point")
    if criterion is not None:
        return select_point(game, criterion, k, cfg).point
    if weights is not None:
        return scalarize(game, weights, cfg)
    assert point is not None
    return pareto_point(game, point, cfg)
