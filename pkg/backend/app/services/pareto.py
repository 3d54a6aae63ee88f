import logging
from collections.abc import Iterable
from typing import Literal

import numpy as np
from scipy.optimize import nnls
from scipy.stats import qmc

from app.core.exceptions import (
    InputError,
    KantianError,
    NonInteriorError,
    NotEfficientError,
)
from app.models import Certification, FrontierSweep, ParetoPoint, SolverConfig
from app.services.games import PayoffModel, as_profile, hessians
from app.services.solve import maximize_concave

logger = logging.getLogger(__name__)

# Weight on the sum-to-one row of the multiplier least-squares problem
SIMPLEX_ROW_WEIGHT = 1e3
POLISH_STEPS = 3
SPREAD_BISECTIONS = 12
SPREAD_MARGIN = 0.95


def normalize_weights(m: Iterable[float], n: int) -> np.ndarray:
    weights = np.asarray(list(m), dtype=float)
    if weights.shape != (n,):
        raise InputError(f"Expected {n} weights, got {weights.size}")
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise InputError("Scalarization weights must be finite and strictly positive")
    return weights / weights.sum()


def gradient_scale(G: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(G, axis=1).max()))


def certify_efficiency(
    game: PayoffModel,
    x: np.ndarray | list[float],
    tol: float | None = None,
    cfg: SolverConfig | None = None,
) -> Certification:
    """Look for m >= 0, sum(m) = 1 nulling sum_i m_i grad U_i(x).

    Accepts iff the relative residual is within ``tol`` and every multiplier
    clears the strict-positivity floor. Rejection is a return value.
    """
    cfg = cfg or SolverConfig()
    tol = cfg.cert_tol if tol is None else tol
    x = as_profile(game, x)
    n = game.n
    if np.any(x <= 0):
        return Certification(
            accepted=False, m=[], residual=float("inf"), reason="profile is not interior"
        )
    G = game.gradient(x)
    scale = gradient_scale(G)
    A = np.vstack([G.T / scale, np.full((1, n), SIMPLEX_ROW_WEIGHT)])
    b = np.zeros(n + 1)
    b[-1] = SIMPLEX_ROW_WEIGHT
    m, _ = nnls(A, b)
    total = float(m.sum())
    if total <= 0:
        return Certification(
            accepted=False, m=[], residual=float("inf"), reason="no nonnegative multipliers"
        )
    m = m / total
    residual = float(np.linalg.norm(G.T @ m)) / scale
    reason = None
    if residual > tol:
        reason = f"weighted gradient residual {residual:.3g} exceeds {tol:.3g}"
    elif m.min() < cfg.multiplier_floor:
        reason = f"multiplier {m.min():.3g} below positivity floor {cfg.multiplier_floor:.3g}"
    return Certification(accepted=reason is None, m=m.tolist(), residual=residual, reason=reason)


def _polish(game: PayoffModel, weights: np.ndarray, x: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Newton steps on the stationarity system of an interior weighted optimum."""
    for _ in range(POLISH_STEPS):
        g = game.gradient(x).T @ weights
        norm = float(np.linalg.norm(g))
        if norm == 0.0:
            break
        H = np.tensordot(weights, hessians(game, x, cfg.fd_step), axes=1)
        try:
            dx = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            break
        x_new = x + dx
        if np.any(x_new <= 0):
            break
        if float(np.linalg.norm(game.gradient(x_new).T @ weights)) >= norm:
            break
        x = x_new
    return x


def scalarize(
    game: PayoffModel,
    m: Iterable[float],
    cfg: SolverConfig | None = None,
    x0: np.ndarray | None = None,
) -> ParetoPoint:
    """Maximize sum_i m_i U_i and certify the result as an interior Pareto point."""
    cfg = cfg or SolverConfig()
    weights = normalize_weights(m, game.n)

    def objective(x: np.ndarray) -> float:
        return float(weights @ game.payoffs(x))

    def ascent(x: np.ndarray) -> np.ndarray:
        return game.gradient(x).T @ weights

    start = np.ones(game.n) if x0 is None else as_profile(game, x0)
    x = maximize_concave(objective, ascent, start, cfg)
    if np.any(x <= 1e-10 * max(1.0, float(x.max()))):
        raise NonInteriorError(
            f"Weighted optimum for m={np.round(weights, 6).tolist()} lies on the "
            f"boundary: x={x.tolist()}",
            x,
            weights,
        )
    x = _polish(game, weights, x, cfg)
    cert = certify_efficiency(game, x, cfg.cert_tol, cfg)
    if not cert.accepted:
        raise NotEfficientError(
            f"Scalarized point failed certification: {cert.reason}", x, cert.residual
        )
    G = game.gradient(x)
    return ParetoPoint(
        x=x.tolist(),
        m=weights.tolist(),
        payoffs=game.payoffs(x).tolist(),
        cert_residual=float(np.linalg.norm(G.T @ weights)) / gradient_scale(G),
    )


def frontier_weights(n: int, k: int, spread: float = 1.0) -> np.ndarray:
    """k interior weight vectors, contracted towards the barycenter by ``spread``.

    n = 2: the uniform grid m_1 = j/(k+1). n > 2: the barycenter followed by
    unscrambled Halton points mapped onto the simplex by sorted spacings.
    """
    if k < 1:
        raise InputError("A frontier sweep needs at least one point")
    if not 0.0 <= spread <= 1.0:
        raise InputError(f"spread must lie in [0, 1], got {spread}")
    bary = np.full(n, 1.0 / n)
    if n == 2:
        m1 = np.arange(1, k + 1) / (k + 1)
        raw = np.column_stack([m1, 1.0 - m1])
    else:
        raw = np.empty((k, n))
        raw[0] = bary
        if k > 1:
            u = np.sort(qmc.Halton(d=n - 1, scramble=False).random(k)[1:], axis=1)
            edges = np.hstack([np.zeros((k - 1, 1)), u, np.ones((k - 1, 1))])
            raw[1:] = np.diff(edges, axis=1)
    return bary + spread * (raw - bary)


def interior_spread(game: PayoffModel, k: int, cfg: SolverConfig | None = None) -> float:
    """Largest contraction of the sweep weights under which every weight stays interior."""
    cfg = cfg or SolverConfig()
    n = game.n
    full = frontier_weights(n, k, 1.0)
    bary = np.full(n, 1.0 / n)
    # most lopsided weights first
    order = np.argsort(full.min(axis=1))

    def interior_at(s: float) -> bool:
        for j in order:
            try:
                scalarize(game, bary + s * (full[j] - bary), cfg)
            except KantianError:
                return False
        return True

    if interior_at(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(SPREAD_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if interior_at(mid):
            lo = mid
        else:
            hi = mid
    spread = lo * SPREAD_MARGIN if interior_at(lo * SPREAD_MARGIN) else lo
    logger.info("Sweep weights contracted to spread %.4f to stay interior", spread)
    return spread


def sweep_frontier(
    game: PayoffModel,
    k: int,
    cfg: SolverConfig | None = None,
    spread: float | Literal["auto"] = "auto",
) -> FrontierSweep:
    cfg = cfg or SolverConfig()
    s = interior_spread(game, k, cfg) if spread == "auto" else float(spread)
    weights = list(frontier_weights(game.n, k, s))

    def attempt(w: np.ndarray) -> ParetoPoint | None:
        try:
            return scalarize(game, w, cfg)
        except NonInteriorError as exc:
            logger.warning("Boundary rejection: %s", exc)
            return None

    results = [attempt(w) for w in weights]
    kept: list[ParetoPoint] = []
    rejections = duplicates = 0
    for point in results:
        if point is None:
            rejections += 1
            continue
        x = np.asarray(point.x)
        if any(np.abs(x - np.asarray(q.x)).max() <= cfg.dedup_spacing for q in kept):
            duplicates += 1
            continue
        kept.append(point)
    logger.info(
        "Frontier sweep: %d interior points, %d boundary rejections, %d duplicates",
        len(kept),
        rejections,
        duplicates,
    )
    return FrontierSweep(
        points=kept,
        requested=k,
        spread=s,
        boundary_rejections=rejections,
        duplicates=duplicates,
    )


def dominates(u: Iterable[float], w: Iterable[float], strict: bool = False) -> bool:
    """Pareto dominance of payoff vector u over w."""
    a, b = np.asarray(list(u)), np.asarray(list(w))
    if strict:
        return bool(np.all(a > b))
    return bool(np.all(a >= b) and np.any(a > b))


def pareto_point(
    game: PayoffModel, x: np.ndarray | list[float], cfg: SolverConfig | None = None
) -> ParetoPoint:
    """Wrap a user-supplied profile as a ParetoPoint, or raise if it is not one."""
    cfg = cfg or SolverConfig()
    profile = as_profile(game, x)
    cert = certify_efficiency(game, profile, cfg.cert_tol, cfg)
    if not cert.accepted:
        raise NotEfficientError(
            f"Profile {profile.tolist()} is not an interior Pareto point: {cert.reason}",
            profile,
            cert.residual,
        )
    return ParetoPoint(
        x=profile.tolist(),
        m=cert.m,
        payoffs=game.payoffs(profile).tolist(),
        cert_residual=cert.residual,
    )
